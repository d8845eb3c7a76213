#pragma once

// Plain-text graph files.
//
//   member graph:  first non-comment line is n, then one "u v" edge per line
//   endorsements:  first non-comment line is n, then "u v" or "u v w" per line
//
// '#' starts a comment anywhere on a line; blank lines are skipped.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "skillrank/graph.hpp"

namespace skillrank {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Fixed-point text with the given number of decimals.
inline std::string format_fixed(double x, int decimals) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

/// Reads the header line holding n and hands each remaining non-empty line to
/// `on_line(fields, line_number)`.
template <typename OnLine>
std::size_t read_counted_lines(std::istream& in, const std::string& source, OnLine&& on_line) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> n;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (!n) {
            if (fields.size() != 1) throw ParseError(source, lineno, "expected member count on first line");
            n = parse_number<std::size_t>(fields[0]);
            if (!n) throw ParseError(source, lineno, "invalid member count '" + std::string(fields[0]) + "'");
            continue;
        }
        on_line(fields, lineno);
    }
    if (!n) throw ParseError(source, lineno, "missing member count header");
    return *n;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace detail

inline MemberGraph read_member_graph(std::istream& in, const std::string& source = "<stream>") {
    std::vector<MemberGraph::Edge> edges;
    std::vector<std::size_t> lines;
    auto n = detail::read_counted_lines(in, source, [&](const auto& f, std::size_t lineno) {
        if (f.size() != 2) throw ParseError(source, lineno, "expected 'u v'");
        auto u = detail::parse_number<MemberId>(f[0]);
        auto v = detail::parse_number<MemberId>(f[1]);
        if (!u || !v) throw ParseError(source, lineno, "invalid member id");
        if (*u == *v) throw ParseError(source, lineno, "self-loop on member " + std::to_string(*u));
        edges.emplace_back(*u, *v);
        lines.push_back(lineno);
    });
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].first >= n || edges[i].second >= n) {
            throw ParseError(source, lines[i], "endpoint >= declared n=" + std::to_string(n));
        }
    }
    return MemberGraph(n, std::move(edges));
}

inline MemberGraph load_member_graph(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_member_graph(in, path.string());
}

inline void write_member_graph(std::ostream& out, const MemberGraph& g) {
    out << g.size() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline void save_member_graph(const std::filesystem::path& path, const MemberGraph& g) {
    auto out = detail::open_output(path);
    write_member_graph(out, g);
}

/// When `expected_n` is given the header must agree with it.
inline EndorsementDigraph read_endorsement_digraph(std::istream& in, std::optional<std::size_t> expected_n = {},
                                                   const std::string& source = "<stream>") {
    std::vector<Arc> arcs;
    std::vector<std::size_t> lines;
    std::set<std::pair<MemberId, MemberId>> seen;
    auto n = detail::read_counted_lines(in, source, [&](const auto& f, std::size_t lineno) {
        if (f.size() != 2 && f.size() != 3) throw ParseError(source, lineno, "expected 'u v' or 'u v w'");
        auto u = detail::parse_number<MemberId>(f[0]);
        auto v = detail::parse_number<MemberId>(f[1]);
        if (!u || !v) throw ParseError(source, lineno, "invalid member id");
        if (*u == *v) throw ParseError(source, lineno, "self-loop on member " + std::to_string(*u));
        double w = 1.0;
        if (f.size() == 3) {
            auto parsed = detail::parse_number<double>(f[2]);
            if (!parsed) throw ParseError(source, lineno, "invalid weight '" + std::string(f[2]) + "'");
            w = *parsed;
            if (!(w > 0.0)) throw ParseError(source, lineno, "non-positive weight");
            if (w > 1.0) throw ParseError(source, lineno, "weight above 1");
        }
        if (!seen.insert({*u, *v}).second) {
            throw ParseError(source, lineno, "duplicate arc " + std::to_string(*u) + "->" + std::to_string(*v));
        }
        arcs.push_back({*u, *v, w});
        lines.push_back(lineno);
    });
    if (expected_n && *expected_n != n) {
        throw ParseError(source, 1, "member count " + std::to_string(n) + " does not match expected " +
                                        std::to_string(*expected_n));
    }
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (arcs[i].source >= n || arcs[i].target >= n) {
            throw ParseError(source, lines[i], "endpoint >= n=" + std::to_string(n));
        }
    }
    return EndorsementDigraph(n, std::move(arcs));
}

inline EndorsementDigraph load_endorsement_digraph(const std::filesystem::path& path,
                                                   std::optional<std::size_t> expected_n = {}) {
    auto in = detail::open_input(path);
    return read_endorsement_digraph(in, expected_n, path.string());
}

/// Unit weights are written as bare "u v" lines.
inline void write_endorsement_digraph(std::ostream& out, const EndorsementDigraph& d) {
    out << d.size() << '\n';
    for (const auto& a : d.arcs()) {
        out << a.source << ' ' << a.target;
        if (a.weight != 1.0) out << ' ' << format_double(a.weight);
        out << '\n';
    }
}

inline void save_endorsement_digraph(const std::filesystem::path& path, const EndorsementDigraph& d) {
    auto out = detail::open_output(path);
    write_endorsement_digraph(out, d);
}

/// Sidecar label file: one display name per line, line i naming member i.
inline std::vector<std::string> load_member_names(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        names.push_back(line);
    }
    return names;
}

}  // namespace skillrank
