#pragma once

// Experiment configuration as a single JSON document, the bundled presets,
// and the on-disk dataset layout shared by the command-line tools.
//
// Dataset directory:
//   base.txt          member network (edge list)
//   skills.txt        one skill name per line, line k naming skill k
//   skill_<k>.txt     endorsement digraph of skill k
//   deduction.csv     skill deduction matrix
//   manifest.json     config, seed, achieved co-occurrence, arc counts

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skillrank/deduction.hpp"
#include "skillrank/experiment.hpp"
#include "skillrank/graph.hpp"
#include "skillrank/io.hpp"
#include "skillrank/netgen.hpp"
#include "skillrank/pagerank.hpp"

namespace skillrank {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed endorsement digraphs given in the config instead of generated ones.
struct InlineDataset {
    std::size_t n = 0;
    std::vector<std::vector<Arc>> arcs;
};

struct SpamSettings {
    std::optional<std::size_t> assistants;
    SpamAllianceConfig::Attach attach_mode = SpamAllianceConfig::Attach::isolated;
    MemberId anchor = 0;
    std::optional<std::pair<std::size_t, std::size_t>> sweep;
};

struct ExperimentConfig {
    std::string name;
    GeneratorConfig generator;
    std::optional<InlineDataset> dataset;
    SkillDeductionMatrix deduction_matrix;
    /// Empty means every skill.
    std::optional<SkillId> main_skill;
    PageRankParams pagerank;
    SpamSettings spam;
    std::size_t histogram_bins = 20;
    double tie_tolerance = kDefaultTieTolerance;
    TauVariant tau_variant = TauVariant::b;
    std::size_t workers = 1;
    std::filesystem::path output_dir = "out";

    const SkillSet& skills() const noexcept { return generator.skills; }

    EvaluationOptions evaluation_options() const {
        EvaluationOptions opt;
        opt.pagerank = pagerank;
        opt.spam_assistants = spam.assistants;
        opt.attach_mode = spam.attach_mode;
        opt.anchor = spam.anchor;
        opt.sweep = spam.sweep;
        opt.histogram_bins = histogram_bins;
        opt.tie_tolerance = tie_tolerance;
        opt.tau_variant = tau_variant;
        opt.workers = workers;
        return opt;
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("key '") + key + "' has the wrong type");
    }
}

inline Matrix parse_matrix(const json& j, std::size_t s, std::string_view what) {
    Matrix m;
    try {
        m = j.get<Matrix>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(what) + " must be an array of number arrays");
    }
    if (m.size() != s) throw ConfigError(std::string(what) + " must have one row per skill");
    for (const auto& row : m) {
        if (row.size() != s) throw ConfigError(std::string(what) + " must be square");
    }
    return m;
}

inline SkillId resolve_skill(const json& j, const SkillSet& skills) {
    if (j.is_number_unsigned()) {
        const auto k = j.get<std::size_t>();
        if (k >= skills.size()) throw ConfigError("skill index " + std::to_string(k) + " out of range");
        return static_cast<SkillId>(k);
    }
    if (j.is_string()) {
        if (auto k = skills.find(j.get<std::string>())) return *k;
        throw ConfigError("unknown skill '" + j.get<std::string>() + "'");
    }
    throw ConfigError("skill must be an index or a name");
}

inline GeneratorConfig parse_generator(const json& j) {
    reject_unknown_keys(j, "generator",
                        {"seed", "n_target", "edge_target", "triangle_closing_prob", "skills", "skill_arc_targets",
                         "cooccurrence_target", "cooccurrence_tolerance", "arcs_per_holder", "endorsement_bias",
                         "annealing_proposals"});
    GeneratorConfig g;
    g.seed = get_or<std::uint64_t>(j, "seed", g.seed);
    g.n_target = get_or<std::size_t>(j, "n_target", g.n_target);
    if (j.contains("edge_target") && !j["edge_target"].is_null()) g.edge_target = get_or<std::size_t>(j, "edge_target", 0);
    g.triangle_closing_prob = get_or<double>(j, "triangle_closing_prob", g.triangle_closing_prob);
    g.skills.names = get_or<std::vector<std::string>>(j, "skills", {});
    if (g.skills.names.empty()) throw ConfigError("generator.skills must list at least one skill");
    if (std::set<std::string>(g.skills.names.begin(), g.skills.names.end()).size() != g.skills.size()) {
        throw ConfigError("generator.skills contains a duplicate name");
    }
    g.skill_arc_targets = get_or<std::vector<std::size_t>>(j, "skill_arc_targets", {});
    if (!g.skill_arc_targets.empty() && g.skill_arc_targets.size() != g.skills.size()) {
        throw ConfigError("generator.skill_arc_targets needs one entry per skill");
    }
    if (j.contains("cooccurrence_target") && !j["cooccurrence_target"].is_null()) {
        g.cooccurrence_target = parse_matrix(j["cooccurrence_target"], g.skills.size(), "generator.cooccurrence_target");
    }
    g.cooccurrence_tolerance = get_or<double>(j, "cooccurrence_tolerance", g.cooccurrence_tolerance);
    g.arcs_per_holder = get_or<double>(j, "arcs_per_holder", g.arcs_per_holder);
    g.endorsement_bias = get_or<double>(j, "endorsement_bias", g.endorsement_bias);
    g.annealing_proposals = get_or<std::size_t>(j, "annealing_proposals", g.annealing_proposals);
    if (!(g.triangle_closing_prob >= 0.0 && g.triangle_closing_prob <= 1.0)) {
        throw ConfigError("generator.triangle_closing_prob must lie in [0,1]");
    }
    if (!(g.arcs_per_holder >= 1.0)) throw ConfigError("generator.arcs_per_holder must be at least 1");
    return g;
}

inline InlineDataset parse_inline_dataset(const json& j, std::size_t n_skills) {
    reject_unknown_keys(j, "dataset", {"members", "endorsements"});
    InlineDataset ds;
    ds.n = get_or<std::size_t>(j, "members", 0);
    if (ds.n == 0) throw ConfigError("dataset.members must be positive");
    const auto& lists = j.at("endorsements");
    if (!lists.is_array() || lists.size() != n_skills) {
        throw ConfigError("dataset.endorsements needs one arc list per skill");
    }
    for (const auto& list : lists) {
        std::vector<Arc> arcs;
        for (const auto& a : list) {
            if (!a.is_array() || a.size() < 2 || a.size() > 3) {
                throw ConfigError("dataset arcs are [source, target] or [source, target, weight]");
            }
            Arc arc{a[0].get<MemberId>(), a[1].get<MemberId>(), a.size() == 3 ? a[2].get<double>() : 1.0};
            arcs.push_back(arc);
        }
        ds.arcs.push_back(std::move(arcs));
    }
    return ds;
}

inline SpamSettings parse_spam(const json& j) {
    reject_unknown_keys(j, "spam", {"assistants", "attach", "anchor", "sweep"});
    SpamSettings s;
    if (j.contains("assistants") && !j["assistants"].is_null()) {
        s.assistants = get_or<std::size_t>(j, "assistants", 0);
        if (*s.assistants < 1) throw ConfigError("spam.assistants must be at least 1");
    }
    const auto attach = get_or<std::string>(j, "attach", "isolated");
    if (attach == "isolated") {
        s.attach_mode = SpamAllianceConfig::Attach::isolated;
    } else if (attach == "linked") {
        s.attach_mode = SpamAllianceConfig::Attach::linked;
    } else {
        throw ConfigError("spam.attach must be 'isolated' or 'linked'");
    }
    s.anchor = get_or<MemberId>(j, "anchor", 0);
    if (j.contains("sweep") && !j["sweep"].is_null()) {
        const auto bounds = get_or<std::vector<std::size_t>>(j, "sweep", {});
        if (bounds.size() != 2) throw ConfigError("spam.sweep must be [min, max]");
        if (bounds[0] < 1 || bounds[0] > bounds[1]) throw ConfigError("spam.sweep bounds need 1 <= min <= max");
        s.sweep = std::pair{bounds[0], bounds[1]};
    }
    return s;
}

inline PageRankParams parse_pagerank(const json& j) {
    reject_unknown_keys(j, "pagerank", {"alpha", "tolerance", "max_iterations"});
    PageRankParams p;
    p.alpha = get_or<double>(j, "alpha", p.alpha);
    p.tolerance = get_or<double>(j, "tolerance", p.tolerance);
    p.max_iterations = get_or<std::size_t>(j, "max_iterations", p.max_iterations);
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ConfigError("pagerank.alpha must lie in (0,1)");
    if (!(p.tolerance > 0.0)) throw ConfigError("pagerank.tolerance must be positive");
    return p;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    using detail::get_or;
    detail::reject_unknown_keys(j, "config",
                                {"name", "generator", "dataset", "deduction_matrix", "main_skill", "pagerank", "spam",
                                 "evaluation", "output_dir"});
    ExperimentConfig c;
    try {
        c.name = get_or<std::string>(j, "name", "experiment");
        if (!j.contains("generator")) throw ConfigError("config needs a 'generator' section");
        c.generator = detail::parse_generator(j["generator"]);
        const auto s = c.generator.skills.size();
        if (j.contains("dataset") && !j["dataset"].is_null()) {
            c.dataset = detail::parse_inline_dataset(j["dataset"], s);
        } else if (c.generator.skill_arc_targets.empty()) {
            throw ConfigError("generator.skill_arc_targets is required unless an inline dataset is given");
        }
        if (!j.contains("deduction_matrix")) throw ConfigError("config needs a 'deduction_matrix'");
        c.deduction_matrix = SkillDeductionMatrix(c.generator.skills,
                                                  detail::parse_matrix(j["deduction_matrix"], s, "deduction_matrix"));
        if (j.contains("main_skill") && !(j["main_skill"].is_string() && j["main_skill"] == "all")) {
            c.main_skill = detail::resolve_skill(j["main_skill"], c.generator.skills);
        }
        if (j.contains("pagerank")) c.pagerank = detail::parse_pagerank(j["pagerank"]);
        if (j.contains("spam") && !j["spam"].is_null()) c.spam = detail::parse_spam(j["spam"]);
        if (j.contains("evaluation")) {
            const auto& e = j["evaluation"];
            detail::reject_unknown_keys(e, "evaluation", {"histogram_bins", "tie_tolerance", "tau", "workers"});
            c.histogram_bins = get_or<std::size_t>(e, "histogram_bins", c.histogram_bins);
            c.tie_tolerance = get_or<double>(e, "tie_tolerance", c.tie_tolerance);
            const auto tau = get_or<std::string>(e, "tau", "b");
            if (tau != "a" && tau != "b") throw ConfigError("evaluation.tau must be 'a' or 'b'");
            c.tau_variant = tau == "a" ? TauVariant::a : TauVariant::b;
            c.workers = get_or<std::size_t>(e, "workers", c.workers);
            if (c.histogram_bins < 1) throw ConfigError("evaluation.histogram_bins must be positive");
            if (!(c.tie_tolerance >= 0.0)) throw ConfigError("evaluation.tie_tolerance must be non-negative");
        }
        c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir.string());
    } catch (const DeductionError& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json g{{"seed", c.generator.seed},
                     {"n_target", c.generator.n_target},
                     {"edge_target", c.generator.edge_target ? nlohmann::json(*c.generator.edge_target) : nlohmann::json(nullptr)},
                     {"triangle_closing_prob", c.generator.triangle_closing_prob},
                     {"skills", c.generator.skills.names},
                     {"skill_arc_targets", c.generator.skill_arc_targets},
                     {"cooccurrence_target", c.generator.cooccurrence_target
                                                 ? nlohmann::json(*c.generator.cooccurrence_target)
                                                 : nlohmann::json(nullptr)},
                     {"cooccurrence_tolerance", c.generator.cooccurrence_tolerance},
                     {"arcs_per_holder", c.generator.arcs_per_holder},
                     {"endorsement_bias", c.generator.endorsement_bias},
                     {"annealing_proposals", c.generator.annealing_proposals}};
    nlohmann::json spam{{"attach", c.spam.attach_mode == SpamAllianceConfig::Attach::linked ? "linked" : "isolated"},
                        {"anchor", c.spam.anchor}};
    spam["assistants"] = c.spam.assistants ? nlohmann::json(*c.spam.assistants) : nlohmann::json(nullptr);
    spam["sweep"] = c.spam.sweep ? nlohmann::json::array({c.spam.sweep->first, c.spam.sweep->second}) : nlohmann::json(nullptr);
    nlohmann::json j{{"name", c.name},
                     {"generator", g},
                     {"deduction_matrix", c.deduction_matrix.rows()},
                     {"main_skill", c.main_skill ? nlohmann::json(*c.main_skill) : nlohmann::json("all")},
                     {"pagerank",
                      {{"alpha", c.pagerank.alpha},
                       {"tolerance", c.pagerank.tolerance},
                       {"max_iterations", c.pagerank.max_iterations}}},
                     {"spam", spam},
                     {"evaluation",
                      {{"histogram_bins", c.histogram_bins},
                       {"tie_tolerance", c.tie_tolerance},
                       {"tau", c.tau_variant == TauVariant::a ? "a" : "b"},
                       {"workers", c.workers}}},
                     {"output_dir", c.output_dir.string()}};
    if (c.dataset) {
        nlohmann::json lists = nlohmann::json::array();
        for (const auto& arcs : c.dataset->arcs) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& a : arcs) {
                list.push_back(a.weight == 1.0 ? nlohmann::json{a.source, a.target}
                                               : nlohmann::json{a.source, a.target, a.weight});
            }
            lists.push_back(std::move(list));
        }
        j["dataset"] = {{"members", c.dataset->n}, {"endorsements", lists}};
    }
    return j;
}

namespace presets {

inline constexpr std::string_view table1 = R"json({
  "name": "table1",
  "generator": {
    "seed": 1,
    "n_target": 1493,
    "edge_target": 2489,
    "skills": ["Programming", "C++", "Java", "Mathematical Modelling", "Statistics"],
    "skill_arc_targets": [220, 140, 137, 134, 128],
    "cooccurrence_target": [
      [1.00, 0.42, 0.42, 0.50, 0.33],
      [0.62, 1.00, 0.62, 0.25, 0.12],
      [0.62, 0.62, 1.00, 0.12, 0.12],
      [0.75, 0.25, 0.12, 1.00, 0.50],
      [0.50, 0.12, 0.12, 0.50, 1.00]
    ],
    "cooccurrence_tolerance": 0.05,
    "arcs_per_holder": 1.2,
    "endorsement_bias": 1.0
  },
  "deduction_matrix": [
    [1.0, 0.7, 0.7, 0.4, 0.3],
    [1.0, 1.0, 0.6, 0.4, 0.3],
    [1.0, 0.7, 1.0, 0.4, 0.3],
    [0.3, 0.2, 0.2, 1.0, 0.8],
    [0.3, 0.2, 0.2, 1.0, 1.0]
  ],
  "main_skill": "all",
  "pagerank": {"alpha": 0.85, "tolerance": 1e-12, "max_iterations": 1000},
  "spam": {"assistants": 2, "attach": "isolated", "sweep": [2, 8]},
  "evaluation": {"histogram_bins": 20, "tie_tolerance": 1e-9, "tau": "b", "workers": 4},
  "output_dir": "out/table1"
})json";

inline constexpr std::string_view table2 = R"json({
  "name": "table2",
  "generator": {
    "seed": 1,
    "n_target": 1493,
    "edge_target": 2489,
    "skills": ["Programming", "C++", "Java", "Mathematical Modelling", "Statistics"],
    "skill_arc_targets": [427, 1793, 1856, 1406, 1447],
    "cooccurrence_target": null,
    "arcs_per_holder": 2.5,
    "endorsement_bias": 3.0
  },
  "deduction_matrix": [
    [1.0, 0.7, 0.7, 0.4, 0.3],
    [1.0, 1.0, 0.6, 0.4, 0.3],
    [1.0, 0.7, 1.0, 0.4, 0.3],
    [0.3, 0.2, 0.2, 1.0, 0.8],
    [0.3, 0.2, 0.2, 1.0, 1.0]
  ],
  "main_skill": "all",
  "pagerank": {"alpha": 0.85, "tolerance": 1e-12, "max_iterations": 1000},
  "spam": {"assistants": 2, "attach": "isolated"},
  "evaluation": {"histogram_bins": 20, "tie_tolerance": 1e-9, "tau": "b", "workers": 4},
  "output_dir": "out/table2"
})json";

inline constexpr std::string_view toy = R"json({
  "name": "toy",
  "generator": {
    "skills": ["Programming", "C++", "Java"]
  },
  "dataset": {
    "members": 6,
    "endorsements": [
      [[0, 1], [2, 4], [3, 5], [4, 5]],
      [[0, 1], [0, 5], [3, 4]],
      [[1, 4], [5, 4], [2, 0]]
    ]
  },
  "deduction_matrix": [
    [1.0, 0.5, 0.5],
    [0.8, 1.0, 0.3],
    [0.8, 0.3, 1.0]
  ],
  "main_skill": "Programming",
  "pagerank": {"alpha": 0.85, "tolerance": 1e-12, "max_iterations": 1000},
  "evaluation": {"histogram_bins": 5, "tie_tolerance": 1e-9, "tau": "b", "workers": 1},
  "output_dir": "out/toy"
})json";

}  // namespace presets

inline std::vector<std::string> preset_names() { return {"table1", "table2", "toy"}; }

inline std::optional<std::string_view> preset_text(std::string_view name) {
    if (name == "table1") return presets::table1;
    if (name == "table2") return presets::table2;
    if (name == "toy") return presets::toy;
    return std::nullopt;
}

inline ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source = "<config>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return parse_experiment_config(j);
}

/// `name_or_path` is a bundled preset name or a path to a JSON file.
inline ExperimentConfig load_experiment_config(const std::string& name_or_path) {
    if (auto text = preset_text(name_or_path)) return parse_experiment_config(*text, name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw ConfigError("no preset or readable config file named '" + name_or_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str(), name_or_path);
}

/// Generates the dataset, or assembles the inline one.
inline Dataset materialize(const ExperimentConfig& c) {
    if (!c.dataset) return generate_dataset(c.generator);
    Dataset ds{MemberGraph(c.dataset->n, {}), c.generator.skills, {}, {}, 0.0};
    try {
        for (const auto& arcs : c.dataset->arcs) ds.digraphs.emplace_back(c.dataset->n, arcs);
    } catch (const GraphError& e) {
        throw ConfigError(std::string("dataset: ") + e.what());
    }
    ds.achieved_cooccurrence = measure_cooccurrence(ds.digraphs).values;
    return ds;
}

inline std::filesystem::path skill_file(const std::filesystem::path& dir, SkillId k) {
    return dir / ("skill_" + std::to_string(k) + ".txt");
}

inline nlohmann::json dataset_manifest(const ExperimentConfig& c, const Dataset& ds) {
    std::vector<std::size_t> arc_counts;
    for (const auto& d : ds.digraphs) arc_counts.push_back(d.arc_count());
    return {{"config", to_json(c)},
            {"seed", c.generator.seed},
            {"members", ds.base.size()},
            {"edges", ds.base.edge_count()},
            {"triangle_closing_prob", ds.closing_prob},
            {"arc_counts", arc_counts},
            {"achieved_cooccurrence", ds.achieved_cooccurrence}};
}

inline void save_dataset(const std::filesystem::path& dir, const ExperimentConfig& c, const Dataset& ds) {
    std::filesystem::create_directories(dir);
    save_member_graph(dir / "base.txt", ds.base);
    {
        auto out = detail::open_output(dir / "skills.txt");
        for (const auto& name : ds.skills.names) out << name << '\n';
    }
    for (SkillId k = 0; k < ds.digraphs.size(); ++k) save_endorsement_digraph(skill_file(dir, k), ds.digraphs[k]);
    {
        auto out = detail::open_output(dir / "deduction.csv");
        write_deduction_matrix_csv(out, c.deduction_matrix);
    }
    auto out = detail::open_output(dir / "manifest.json");
    out << dataset_manifest(c, ds).dump(2) << '\n';
}

struct LoadedDataset {
    Dataset data;
    /// Present when the directory holds deduction.csv.
    std::optional<SkillDeductionMatrix> deduction_matrix;
};

inline LoadedDataset load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("dataset directory '" + dir.string() + "' not found");
    LoadedDataset out;
    out.data.skills.names = load_member_names(dir / "skills.txt");
    while (!out.data.skills.names.empty() && out.data.skills.names.back().empty()) out.data.skills.names.pop_back();
    out.data.base = load_member_graph(dir / "base.txt");
    const std::size_t n = out.data.base.size();
    for (SkillId k = 0; k < out.data.skills.size(); ++k) {
        out.data.digraphs.push_back(load_endorsement_digraph(skill_file(dir, k), n));
    }
    if (std::filesystem::exists(dir / "deduction.csv")) {
        out.deduction_matrix = load_deduction_matrix(dir / "deduction.csv");
        if (out.deduction_matrix->skills() != out.data.skills) {
            throw ConfigError("deduction.csv skill names differ from skills.txt");
        }
    }
    out.data.achieved_cooccurrence = measure_cooccurrence(out.data.digraphs).values;
    return out;
}

}  // namespace skillrank
