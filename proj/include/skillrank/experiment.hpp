#pragma once

// The comparison protocol: for each skill, rank members with plain PageRank
// and with PageRank after endorsement deduction, then compare the two
// rankings (correlation, ties, spam-leader position, score histograms).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "skillrank/deduction.hpp"
#include "skillrank/graph.hpp"
#include "skillrank/io.hpp"
#include "skillrank/metrics.hpp"
#include "skillrank/netgen.hpp"
#include "skillrank/pagerank.hpp"

namespace skillrank {

struct Dataset {
    MemberGraph base;
    SkillSet skills;
    std::vector<EndorsementDigraph> digraphs;
    Matrix achieved_cooccurrence;
    double closing_prob = 0.0;
};

inline Dataset generate_dataset(const GeneratorConfig& cfg) {
    auto base = generate_base_network_calibrated(cfg);
    auto endorsements = generate_endorsements(base.graph, cfg);
    return {std::move(base.graph), cfg.skills, std::move(endorsements.digraphs), std::move(endorsements.achieved),
            base.closing_prob};
}

struct EvaluationOptions {
    PageRankParams pagerank;
    /// Alliance injected for the main table columns; none when empty.
    std::optional<std::size_t> spam_assistants;
    SpamAllianceConfig::Attach attach_mode = SpamAllianceConfig::Attach::isolated;
    MemberId anchor = 0;
    /// Inclusive assistant-count range for the sweep table.
    std::optional<std::pair<std::size_t, std::size_t>> sweep;
    std::size_t histogram_bins = 20;
    double tie_tolerance = kDefaultTieTolerance;
    TauVariant tau_variant = TauVariant::b;
    std::size_t workers = 1;
};

struct RankingPair {
    RankVector plain;
    RankVector deduced;
};

/// Plain PageRank on the main skill's digraph and weighted PageRank on its
/// deduced digraph.
inline RankingPair rank_both(const std::vector<EndorsementDigraph>& digraphs, const SkillDeductionMatrix& pi,
                             SkillId main, const PageRankParams& params) {
    const auto plan = DeductionPlan::for_main(pi, main);
    return {pagerank(digraphs.at(main), params), pagerank(deduce(digraphs, pi, plan), params)};
}

struct SweepEntry {
    std::size_t n_assistants = 0;
    LeaderDisplacement leader;
};

struct ExperimentReport {
    SkillId skill = 0;
    std::string skill_name;
    /// Members ranked, cheaters included.
    std::size_t n_members = 0;
    std::size_t n_endorsements = 0;
    double rho = std::numeric_limits<double>::quiet_NaN();
    double tau = std::numeric_limits<double>::quiet_NaN();
    std::size_t ties_without = 0;
    std::size_t ties_with = 0;
    std::size_t tie_groups_without = 0;
    std::size_t tie_groups_with = 0;
    /// (ties_without - ties_with) / n_members
    double tie_reduction = 0.0;
    long tie_reduction_pct = 0;
    std::optional<LeaderDisplacement> leader;
    std::vector<SweepEntry> sweep;
    Histogram histogram_without;
    Histogram histogram_with;
    bool converged = true;
};

inline ExperimentReport evaluate_skill(const std::vector<EndorsementDigraph>& digraphs, const SkillDeductionMatrix& pi,
                                       SkillId skill, const EvaluationOptions& opt) {
    ExperimentReport r;
    r.skill = skill;
    r.skill_name = pi.skills().names.at(skill);
    r.n_endorsements = digraphs.at(skill).arc_count();

    auto spammed = [&](std::size_t assistants) {
        SpamAllianceConfig cfg{skill, assistants, opt.attach_mode, opt.anchor};
        return inject_spam_alliance(digraphs, cfg);
    };

    RankingPair ranks;
    if (opt.spam_assistants) {
        auto [injected, leader] = spammed(*opt.spam_assistants);
        ranks = rank_both(injected, pi, skill, opt.pagerank);
        r.leader = leader_displacement(ranks.plain, ranks.deduced, leader, opt.tie_tolerance);
    } else {
        ranks = rank_both(digraphs, pi, skill, opt.pagerank);
    }
    r.converged = ranks.plain.converged && ranks.deduced.converged;
    r.n_members = ranks.plain.size();

    try {
        r.rho = spearman_rho(ranks.plain, ranks.deduced, opt.tie_tolerance);
    } catch (const MetricError&) {
    }
    try {
        r.tau = kendall_tau(ranks.plain, ranks.deduced, opt.tau_variant, opt.tie_tolerance);
    } catch (const MetricError&) {
    }

    const auto ties_plain = tie_summary(ranks.plain.scores, opt.tie_tolerance);
    const auto ties_deduced = tie_summary(ranks.deduced.scores, opt.tie_tolerance);
    r.ties_without = ties_plain.tied_members;
    r.ties_with = ties_deduced.tied_members;
    r.tie_groups_without = ties_plain.groups;
    r.tie_groups_with = ties_deduced.groups;
    const double reduced = static_cast<double>(r.ties_without) - static_cast<double>(r.ties_with);
    r.tie_reduction = reduced / static_cast<double>(r.n_members);
    r.tie_reduction_pct = percent_of(reduced, r.n_members);

    auto [lo_a, hi_a] = std::minmax_element(ranks.plain.scores.begin(), ranks.plain.scores.end());
    auto [lo_b, hi_b] = std::minmax_element(ranks.deduced.scores.begin(), ranks.deduced.scores.end());
    const double lo = std::min(*lo_a, *lo_b);
    const double hi = std::max(*hi_a, *hi_b);
    r.histogram_without = score_histogram(ranks.plain.scores, opt.histogram_bins, lo, hi);
    r.histogram_with = score_histogram(ranks.deduced.scores, opt.histogram_bins, lo, hi);

    if (opt.sweep) {
        for (std::size_t m = opt.sweep->first; m <= opt.sweep->second; ++m) {
            auto [injected, leader] = spammed(m);
            auto sweep_ranks = rank_both(injected, pi, skill, opt.pagerank);
            r.converged = r.converged && sweep_ranks.plain.converged && sweep_ranks.deduced.converged;
            r.sweep.push_back({m, leader_displacement(sweep_ranks.plain, sweep_ranks.deduced, leader, opt.tie_tolerance)});
        }
    }
    return r;
}

/// Evaluates every skill, fanning skills out over `opt.workers` threads.
/// Reports come back in skill order whatever the worker count.
inline std::vector<ExperimentReport> evaluate_all(const std::vector<EndorsementDigraph>& digraphs,
                                                  const SkillDeductionMatrix& pi, const EvaluationOptions& opt,
                                                  std::optional<SkillId> only = std::nullopt) {
    std::vector<SkillId> skills;
    if (only) {
        skills.push_back(*only);
    } else {
        for (SkillId k = 0; k < pi.size(); ++k) skills.push_back(k);
    }
    std::vector<ExperimentReport> reports(skills.size());
    const std::size_t workers = std::max<std::size_t>(1, opt.workers);
    for (std::size_t start = 0; start < skills.size(); start += workers) {
        std::vector<std::future<ExperimentReport>> batch;
        for (std::size_t i = start; i < std::min(skills.size(), start + workers); ++i) {
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                       [&, k = skills[i]] { return evaluate_skill(digraphs, pi, k, opt); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) reports[start + i] = batch[i].get();
    }
    return reports;
}

struct ReportAverages {
    double rho = 0.0;
    double tau = 0.0;
    double tie_reduction_pct = 0.0;
    double leader_fall_pct = 0.0;
};

/// Means over skills of the per-row values, percentages taken as printed.
inline ReportAverages average(const std::vector<ExperimentReport>& reports) {
    ReportAverages avg;
    if (reports.empty()) return avg;
    const auto n = static_cast<double>(reports.size());
    for (const auto& r : reports) {
        avg.rho += r.rho / n;
        avg.tau += r.tau / n;
        avg.tie_reduction_pct += static_cast<double>(r.tie_reduction_pct) / n;
        if (r.leader) avg.leader_fall_pct += static_cast<double>(r.leader->fall_pct) / n;
    }
    return avg;
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string fixed_or_nan(double x, int decimals) { return std::isnan(x) ? "nan" : format_fixed(x, decimals); }

}  // namespace detail

/// One row per skill plus an AVG row, in the column order of the comparison
/// tables. Leader columns appear only when an alliance was injected.
inline void write_report_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    const bool has_leader = !reports.empty() && reports.front().leader.has_value();
    out << "skill,endorsements,members,rho,tau,ties_without,ties_with,tie_reduction_pct";
    if (has_leader) out << ",leader_without,leader_with,leader_fall_pct";
    out << '\n';
    for (const auto& r : reports) {
        out << detail::csv_cell(r.skill_name) << ',' << r.n_endorsements << ',' << r.n_members << ','
            << detail::fixed_or_nan(r.rho, 4) << ',' << detail::fixed_or_nan(r.tau, 4) << ',' << r.ties_without << ','
            << r.ties_with << ',' << r.tie_reduction_pct;
        if (has_leader) {
            out << ',' << r.leader->position_without << ',' << r.leader->position_with << ',' << r.leader->fall_pct;
        }
        out << '\n';
    }
    const auto avg = average(reports);
    out << "AVG,,," << detail::fixed_or_nan(avg.rho, 4) << ',' << detail::fixed_or_nan(avg.tau, 4) << ",,,"
        << format_fixed(avg.tie_reduction_pct, 1);
    if (has_leader) out << ",,," << format_fixed(avg.leader_fall_pct, 1);
    out << '\n';
}

/// Sweep table: per skill, leader position without (-) and with (+)
/// deduction and the fall in percent for each assistant count.
inline void write_sweep_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << "skill";
    if (!reports.empty()) {
        for (const auto& e : reports.front().sweep) {
            out << ",without_" << e.n_assistants << ",with_" << e.n_assistants << ",fall_pct_" << e.n_assistants;
        }
    }
    out << '\n';
    for (const auto& r : reports) {
        out << detail::csv_cell(r.skill_name);
        for (const auto& e : r.sweep) {
            out << ',' << e.leader.position_without << ',' << e.leader.position_with << ',' << e.leader.fall_pct;
        }
        out << '\n';
    }
}

inline void write_histogram_csv(std::ostream& out, const ExperimentReport& r) {
    out << "bin_low,bin_high,count_without,count_with\n";
    const auto& a = r.histogram_without;
    const auto& b = r.histogram_with;
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        out << format_double(a.bin_low(i)) << ',' << format_double(a.bin_high(i)) << ',' << a.counts[i] << ','
            << b.counts[i] << '\n';
    }
}

}  // namespace skillrank
