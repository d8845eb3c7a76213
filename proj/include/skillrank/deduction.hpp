#pragma once

// Endorsement deduction.
//
// Given the endorsement digraphs of every skill and a skill deduction matrix
// Pi (pi(k, t) = probability that being skilled in k implies being skilled in
// t), the main skill's digraph is enriched with arcs inferred from related
// skills:
//
//   Q_0 = M_main
//   Q_k = Q_{k-1} + pi(k, main) * (1 - Q_{k-1}) o M_k      (elementwise)
//
// Each entry of the result is the probability of the union of the independent
// events "an endorsement for skill k implies one for the main skill". Entries
// already at 1 never move and pairs nobody endorsed stay absent.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skillrank/graph.hpp"
#include "skillrank/io.hpp"

namespace skillrank {

class DeductionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Square matrix of skill implication probabilities, indexed by SkillSet order.
/// Row k, column t holds pi(k, t). The diagonal is 1; the matrix need not be
/// symmetric.
class SkillDeductionMatrix {
public:
    SkillDeductionMatrix() = default;

    SkillDeductionMatrix(SkillSet skills, std::vector<std::vector<double>> rows)
        : skills_(std::move(skills)), rows_(std::move(rows)) {
        const std::size_t s = skills_.size();
        if (rows_.size() != s) {
            throw DeductionError("deduction matrix has " + std::to_string(rows_.size()) + " rows for " +
                                 std::to_string(s) + " skills");
        }
        for (std::size_t k = 0; k < s; ++k) {
            if (rows_[k].size() != s) throw DeductionError("deduction matrix row " + std::to_string(k) + " is not square");
            for (std::size_t t = 0; t < s; ++t) {
                const double p = rows_[k][t];
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw DeductionError("deduction matrix entry (" + std::to_string(k) + "," + std::to_string(t) +
                                         ") outside [0,1]");
                }
            }
            if (rows_[k][k] != 1.0) {
                throw DeductionError("deduction matrix diagonal entry for '" + skills_.names[k] + "' must be 1");
            }
        }
    }

    std::size_t size() const noexcept { return rows_.size(); }
    const SkillSet& skills() const noexcept { return skills_; }
    double operator()(SkillId from, SkillId to) const { return rows_.at(from).at(to); }
    const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

private:
    SkillSet skills_;
    std::vector<std::vector<double>> rows_;
};

/// Main skill plus the related skills folded into it, in fold order.
struct DeductionPlan {
    SkillId main = 0;
    std::vector<SkillId> related;

    /// Every other skill k with pi(k, main) > 0, ascending.
    static DeductionPlan for_main(const SkillDeductionMatrix& pi, SkillId main) {
        if (main >= pi.size()) throw DeductionError("main skill index out of range");
        DeductionPlan plan{main, {}};
        for (SkillId k = 0; k < pi.size(); ++k) {
            if (k != main && pi(k, main) > 0.0) plan.related.push_back(k);
        }
        return plan;
    }
};

/// Probability of A or B for independent events with P(A) = existing and
/// P(B) = pi.
inline constexpr double union_probability(double existing, double pi) noexcept {
    return existing + pi * (1.0 - existing);
}

/// One step of the recurrence for a single entry: q + pi * ((1 - q) * m).
/// Bitwise equal to union_probability(q, pi) when m == 1.
inline constexpr double deduction_step(double q, double pi, double m) noexcept {
    return q + pi * ((1.0 - q) * m);
}

namespace detail {

inline void validate_deduction(std::span<const EndorsementDigraph> digraphs, const SkillDeductionMatrix& pi,
                               const DeductionPlan& plan) {
    if (digraphs.size() != pi.size()) {
        throw DeductionError("got " + std::to_string(digraphs.size()) + " digraphs for " + std::to_string(pi.size()) +
                             " skills");
    }
    if (plan.main >= digraphs.size()) throw DeductionError("main skill index out of range");
    const std::size_t n = digraphs[plan.main].size();
    for (const auto& d : digraphs) {
        if (d.size() != n) throw DeductionError("endorsement digraphs disagree on member count");
    }
    std::vector<bool> seen(pi.size(), false);
    for (SkillId k : plan.related) {
        if (k >= pi.size()) throw DeductionError("related skill index out of range");
        if (k == plan.main) throw DeductionError("main skill listed as its own related skill");
        if (seen[k]) throw DeductionError("related skill listed twice");
        seen[k] = true;
        if (!(pi(k, plan.main) > 0.0)) {
            throw DeductionError("related skill '" + pi.skills().names[k] + "' has zero implication probability");
        }
    }
}

struct RowEntry {
    MemberId target;
    std::size_t step;  // 0 = main skill, i = plan.related[i - 1]
    double weight;
};

/// Arcs of row u contributed by the main skill and the related skills,
/// ordered by (target, fold step).
inline void gather_row(std::span<const EndorsementDigraph> digraphs, const DeductionPlan& plan, MemberId u,
                       std::vector<RowEntry>& entries) {
    entries.clear();
    for (const auto& a : digraphs[plan.main].out_arcs(u)) entries.push_back({a.target, 0, a.weight});
    for (std::size_t i = 0; i < plan.related.size(); ++i) {
        for (const auto& a : digraphs[plan.related[i]].out_arcs(u)) entries.push_back({a.target, i + 1, a.weight});
    }
    std::sort(entries.begin(), entries.end(), [](const RowEntry& x, const RowEntry& y) {
        return x.target != y.target ? x.target < y.target : x.step < y.step;
    });
}

}  // namespace detail

/// Weighted digraph D_0^we for `plan.main`. `digraphs[k]` is the digraph of
/// skill k. A related arc of weight w contributes pi(k, main) * w, which is the
/// plain recurrence for unweighted inputs. Only pairs present in some input
/// digraph are visited.
inline EndorsementDigraph deduce(std::span<const EndorsementDigraph> digraphs, const SkillDeductionMatrix& pi,
                                 const DeductionPlan& plan) {
    detail::validate_deduction(digraphs, pi, plan);
    const std::size_t n = digraphs[plan.main].size();
    std::vector<double> step_pi(plan.related.size() + 1, 1.0);
    for (std::size_t i = 0; i < plan.related.size(); ++i) step_pi[i + 1] = pi(plan.related[i], plan.main);

    std::vector<Arc> arcs;
    std::vector<detail::RowEntry> entries;
    for (std::size_t u = 0; u < n; ++u) {
        detail::gather_row(digraphs, plan, static_cast<MemberId>(u), entries);
        std::size_t i = 0;
        while (i < entries.size()) {
            const MemberId target = entries[i].target;
            double q = 0.0;
            for (; i < entries.size() && entries[i].target == target; ++i) {
                const auto& e = entries[i];
                q = e.step == 0 ? e.weight : deduction_step(q, step_pi[e.step], e.weight);
            }
            arcs.push_back({static_cast<MemberId>(u), target, q});
        }
    }
    return EndorsementDigraph(n, std::move(arcs));
}

inline EndorsementDigraph deduce(const std::vector<EndorsementDigraph>& digraphs, const SkillDeductionMatrix& pi,
                                 const DeductionPlan& plan) {
    return deduce(std::span<const EndorsementDigraph>(digraphs), pi, plan);
}

/// Outcome of checking the four monotonicity/boundary properties of the
/// deduction recurrence on a concrete input.
struct Proposition1Report {
    bool bounded = true;          // (a) 0 <= Q_k <= 1
    bool monotone = true;         // (b) Q_k >= Q_{k-1}
    bool zero_iff_unendorsed = true;  // (c)
    bool one_iff_certain = true;      // (d)
    bool matches_deduce = true;       // deduce() agrees with the replayed recurrence
    std::optional<std::string> counterexample;

    bool passed() const noexcept {
        return bounded && monotone && zero_iff_unendorsed && one_iff_certain && matches_deduce;
    }
};

/// Replays the recurrence for every endorsed pair, step by step, and checks
/// it against deduce(). Stops describing after the first counterexample but
/// keeps every flag accurate.
inline Proposition1Report verify_proposition1(std::span<const EndorsementDigraph> digraphs,
                                              const SkillDeductionMatrix& pi, const DeductionPlan& plan) {
    detail::validate_deduction(digraphs, pi, plan);
    Proposition1Report report;
    auto fail = [&](bool& flag, const std::string& what) {
        flag = false;
        if (!report.counterexample) report.counterexample = what;
    };

    const auto enriched = deduce(digraphs, pi, plan);
    const std::size_t n = enriched.size();
    std::vector<std::size_t> skills_in_order{plan.main};
    skills_in_order.insert(skills_in_order.end(), plan.related.begin(), plan.related.end());

    std::size_t endorsed_pairs = 0;
    std::vector<detail::RowEntry> entries;
    for (std::size_t u = 0; u < n; ++u) {
        detail::gather_row(digraphs, plan, static_cast<MemberId>(u), entries);
        std::size_t i = 0;
        while (i < entries.size()) {
            const MemberId v = entries[i].target;
            ++endorsed_pairs;
            const std::string pair = "(" + std::to_string(u) + "," + std::to_string(v) + ")";
            double q = 0.0;
            bool certain = false;
            for (std::size_t step = 0; step < skills_in_order.size(); ++step) {
                const auto skill = static_cast<SkillId>(skills_in_order[step]);
                const double m = digraphs[skill].weight(static_cast<MemberId>(u), v);
                const double p = pi(skill, plan.main);
                const double prev = q;
                q = step == 0 ? m : deduction_step(q, p, m);
                if (m == 1.0 && p == 1.0) certain = true;
                if (!(q >= 0.0 && q <= 1.0)) fail(report.bounded, "Q out of [0,1] at " + pair);
                if (step > 0 && q < prev) fail(report.monotone, "Q decreased at " + pair);
            }
            if (!(q > 0.0) || !enriched.has_arc(static_cast<MemberId>(u), v)) {
                fail(report.zero_iff_unendorsed, "endorsed pair " + pair + " has zero weight");
            }
            if ((q == 1.0) != certain) {
                fail(report.one_iff_certain, "pair " + pair + " has weight " + format_double(q) +
                                                 (certain ? " despite a certain implication" : " without a certain implication"));
            }
            if (enriched.weight(static_cast<MemberId>(u), v) != q) {
                fail(report.matches_deduce, "deduce() disagrees with the recurrence at " + pair);
            }
            while (i < entries.size() && entries[i].target == v) ++i;
        }
    }
    if (enriched.arc_count() != endorsed_pairs) {
        fail(report.zero_iff_unendorsed, "deduce() produced arcs for pairs nobody endorsed");
    }
    return report;
}

inline Proposition1Report verify_proposition1(const std::vector<EndorsementDigraph>& digraphs,
                                              const SkillDeductionMatrix& pi, const DeductionPlan& plan) {
    return verify_proposition1(std::span<const EndorsementDigraph>(digraphs), pi, plan);
}

/// CSV: first row holds the skill names, each following row one matrix row.
inline SkillDeductionMatrix read_deduction_matrix_csv(std::istream& in, const std::string& source = "<stream>") {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            auto b = cell.find_first_not_of(" \t\r");
            auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
        }
        return cells;
    };
    std::string line;
    std::size_t lineno = 0;
    SkillSet skills;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split(line);
        if (skills.names.empty()) {
            skills.names = cells;
            continue;
        }
        if (cells.size() != skills.size()) throw ParseError(source, lineno, "row width differs from header");
        std::vector<double> row;
        for (const auto& c : cells) {
            auto v = detail::parse_number<double>(c);
            if (!v) throw ParseError(source, lineno, "invalid probability '" + c + "'");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (skills.names.empty()) throw ParseError(source, lineno, "empty deduction matrix file");
    try {
        return SkillDeductionMatrix(std::move(skills), std::move(rows));
    } catch (const DeductionError& e) {
        throw ParseError(source, lineno, e.what());
    }
}

inline SkillDeductionMatrix load_deduction_matrix(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_deduction_matrix_csv(in, path.string());
}

inline void write_deduction_matrix_csv(std::ostream& out, const SkillDeductionMatrix& pi) {
    const auto& names = pi.skills().names;
    for (std::size_t t = 0; t < names.size(); ++t) out << (t ? "," : "") << names[t];
    out << '\n';
    for (const auto& row : pi.rows()) {
        for (std::size_t t = 0; t < row.size(); ++t) out << (t ? "," : "") << format_double(row[t]);
        out << '\n';
    }
}

}  // namespace skillrank
