// skillrank: generate synthetic endorsement networks, rank members per skill
// with and without endorsement deduction, and run the comparison experiments.
//
// Exit codes: 0 success, 1 I/O or internal failure, 2 usage or config error,
// 3 infeasible generation targets, 4 PageRank did not converge (outputs are
// still written).

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "skillrank/skillrank.hpp"

namespace fs = std::filesystem;
using namespace skillrank;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNotConverged = 4;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string skill;
    bool deduce = false;
    std::optional<double> alpha;
    std::string out;
    std::string dataset;
    std::string matrix;
    std::optional<std::size_t> workers;
};

ExperimentConfig load_config(const Options& o) {
    auto c = load_experiment_config(o.config);
    if (o.seed) c.generator.seed = *o.seed;
    if (o.alpha) {
        if (!(*o.alpha > 0.0 && *o.alpha < 1.0)) throw ConfigError("--alpha must lie in (0,1)");
        c.pagerank.alpha = *o.alpha;
    }
    if (o.workers) c.workers = *o.workers;
    if (!o.out.empty()) c.output_dir = o.out;
    return c;
}

SkillId resolve_skill(const std::string& text, const SkillSet& skills) {
    if (auto k = skills.find(text)) return *k;
    SkillId k = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
    if (ec != std::errc{} || ptr != text.data() + text.size() || k >= skills.size()) {
        throw ConfigError("unknown skill '" + text + "'");
    }
    return k;
}

/// Dataset from --dataset, or materialized from the config.
struct Workspace {
    Dataset data;
    std::optional<SkillDeductionMatrix> pi;
};

Workspace open_workspace(const Options& o, const std::optional<ExperimentConfig>& cfg) {
    Workspace w;
    if (!o.dataset.empty()) {
        auto loaded = load_dataset(o.dataset);
        w.data = std::move(loaded.data);
        w.pi = std::move(loaded.deduction_matrix);
    } else if (cfg) {
        w.data = materialize(*cfg);
        w.pi = cfg->deduction_matrix;
    } else {
        throw ConfigError("give --dataset or --config");
    }
    if (!o.matrix.empty()) w.pi = load_deduction_matrix(o.matrix);
    if (w.pi && w.pi->skills() != w.data.skills) throw ConfigError("deduction matrix skills differ from the dataset's");
    return w;
}

std::optional<ExperimentConfig> optional_config(const Options& o) {
    if (o.config.empty()) return std::nullopt;
    return load_config(o);
}

template <class Write>
void emit(const std::string& path, Write write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write(out);
}

int cmd_generate(const Options& o) {
    const auto cfg = load_config(o);
    const auto ds = materialize(cfg);
    save_dataset(cfg.output_dir, cfg, ds);
    std::cerr << "wrote " << ds.base.size() << " members, " << ds.base.edge_count() << " contacts, "
              << ds.digraphs.size() << " skills to " << cfg.output_dir.string() << '\n';
    return 0;
}

PageRankParams rank_params(const Options& o, const std::optional<ExperimentConfig>& cfg) {
    PageRankParams p = cfg ? cfg->pagerank : PageRankParams{};
    if (o.alpha) {
        if (!(*o.alpha > 0.0 && *o.alpha < 1.0)) throw ConfigError("--alpha must lie in (0,1)");
        p.alpha = *o.alpha;
    }
    return p;
}

int cmd_rank(const Options& o) {
    const auto cfg = optional_config(o);
    auto w = open_workspace(o, cfg);
    if (o.skill.empty()) throw ConfigError("rank needs --skill");
    const SkillId k = resolve_skill(o.skill, w.data.skills);
    const auto params = rank_params(o, cfg);
    RankVector r;
    if (o.deduce) {
        if (!w.pi) throw ConfigError("--deduce needs a deduction matrix (--matrix, deduction.csv or --config)");
        r = pagerank(deduce(w.data.digraphs, *w.pi, DeductionPlan::for_main(*w.pi, k)), params);
    } else {
        r = pagerank(w.data.digraphs[k], params);
    }
    const double tol = cfg ? cfg->tie_tolerance : kDefaultTieTolerance;
    emit(o.out, [&](std::ostream& out) { write_rank_csv(out, r, tol); });
    if (!r.converged) {
        std::cerr << "warning: PageRank stopped after " << r.iterations_used << " iterations, residual " << r.residual
                  << '\n';
        return kExitNotConverged;
    }
    return 0;
}

int cmd_deduce(const Options& o) {
    const auto cfg = optional_config(o);
    auto w = open_workspace(o, cfg);
    if (o.skill.empty()) throw ConfigError("deduce needs --skill");
    if (!w.pi) throw ConfigError("deduce needs a deduction matrix (--matrix, deduction.csv or --config)");
    const SkillId k = resolve_skill(o.skill, w.data.skills);
    const auto q = deduce(w.data.digraphs, *w.pi, DeductionPlan::for_main(*w.pi, k));
    emit(o.out, [&](std::ostream& out) { write_endorsement_digraph(out, q); });
    return 0;
}

int cmd_cooccur(const Options& o) {
    const auto cfg = optional_config(o);
    auto w = open_workspace(o, cfg);
    const auto m = measure_cooccurrence(w.data.digraphs);
    emit(o.out, [&](std::ostream& out) {
        const auto& names = w.data.skills.names;
        for (std::size_t t = 0; t < names.size(); ++t) out << (t ? "," : "") << names[t];
        out << '\n';
        for (const auto& row : m.values) {
            for (std::size_t t = 0; t < row.size(); ++t) out << (t ? "," : "") << format_fixed(row[t], 4);
            out << '\n';
        }
    });
    return 0;
}

int cmd_evaluate(const Options& o) {
    if (o.config.empty()) throw ConfigError("evaluate needs --config");
    auto cfg = load_config(o);
    if (!o.skill.empty() && o.skill != "all") cfg.main_skill = resolve_skill(o.skill, cfg.skills());
    auto w = open_workspace(o, cfg);
    const auto reports = evaluate_all(w.data.digraphs, *w.pi, cfg.evaluation_options(), cfg.main_skill);

    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    emit((dir / "report.csv").string(), [&](std::ostream& out) { write_report_csv(out, reports); });
    if (cfg.spam.sweep) {
        emit((dir / "sweep.csv").string(), [&](std::ostream& out) { write_sweep_csv(out, reports); });
    }
    bool converged = true;
    for (const auto& r : reports) {
        emit((dir / ("histogram_" + std::to_string(r.skill) + ".csv")).string(),
             [&](std::ostream& out) { write_histogram_csv(out, r); });
        converged = converged && r.converged;
    }
    write_report_csv(std::cout, reports);
    if (!converged) {
        std::cerr << "warning: PageRank did not converge for at least one ranking\n";
        return kExitNotConverged;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Per-skill authority ranking with endorsement deduction"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--config", o.config, "Preset name (table1, table2, toy) or JSON config file");
        if (required) opt->required();
        sub->add_option("--seed", o.seed, "Override the generator seed");
    };
    auto add_dataset = [&](CLI::App* sub) {
        sub->add_option("--dataset", o.dataset, "Dataset directory written by 'generate'");
        sub->add_option("--matrix", o.matrix, "Skill deduction matrix CSV");
    };

    auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset directory");
    add_config(gen, true);
    gen->add_option("--out", o.out, "Output directory (default: config output_dir)");

    auto* rank = app.add_subcommand("rank", "Rank members for one skill");
    add_config(rank, false);
    add_dataset(rank);
    rank->add_option("--skill", o.skill, "Skill name or index")->required();
    rank->add_flag("--deduce", o.deduce, "Deduce endorsements from related skills first");
    rank->add_option("--alpha", o.alpha, "Damping factor");
    rank->add_option("--out", o.out, "Output CSV (default: stdout)");

    auto* eval = app.add_subcommand("evaluate", "Compare plain and deduced rankings for every skill");
    add_config(eval, true);
    add_dataset(eval);
    eval->add_option("--skill", o.skill, "Evaluate only this skill (name, index or 'all')");
    eval->add_option("--alpha", o.alpha, "Damping factor");
    eval->add_option("--workers", o.workers, "Worker threads");
    eval->add_option("--out", o.out, "Output directory (default: config output_dir)");

    auto* ded = app.add_subcommand("deduce", "Write the enriched digraph of one skill");
    add_config(ded, false);
    add_dataset(ded);
    ded->add_option("--skill", o.skill, "Main skill name or index")->required();
    ded->add_option("--out", o.out, "Output file (default: stdout)");

    auto* coo = app.add_subcommand("cooccur", "Print the measured skill co-occurrence matrix");
    add_config(coo, false);
    add_dataset(coo);
    coo->add_option("--out", o.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*rank) return cmd_rank(o);
        if (*eval) return cmd_evaluate(o);
        if (*ded) return cmd_deduce(o);
        if (*coo) return cmd_cooccur(o);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GraphError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DeductionError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
