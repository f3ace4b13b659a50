#pragma once

// File formats: dataset JSON, deterministic CSV, assignment JSON, metrics
// CSV/JSON and run manifests.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ucpc/clustering.hpp"
#include "ucpc/eval.hpp"
#include "ucpc/model.hpp"

namespace ucpc::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                   : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write " + path);
    out << content;
    if (!out) throw data_error("write failed: " + path);
}

/// FNV-1a 64-bit digest, hex encoded.
inline std::string digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream ss;
    ss << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

// ---------------------------------------------------------------------------
// Deterministic CSV
// ---------------------------------------------------------------------------

enum class LabelMode { automatic, last_column, none };

struct DeterministicData {
    std::vector<Vector> points;
    std::optional<Labels> labels;
    std::optional<std::vector<std::string>> header;
};

/// One row per point: numeric columns plus an optional trailing label column.
/// A first row with no numeric cell is a header. With LabelMode::automatic the
/// last column is a label column when its first data cell is not numeric.
inline DeterministicData parse_csv(std::istream& in, LabelMode mode = LabelMode::automatic) {
    DeterministicData out;
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> width;
    bool labelled = mode == LabelMode::last_column;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);

        if (!width) {
            const bool any_numeric = std::any_of(cells.begin(), cells.end(),
                                                 [](const std::string& c) { return parse_double(c).has_value(); });
            if (!any_numeric && !out.header) {
                out.header = cells;
                continue;
            }
            width = cells.size();
            if (mode == LabelMode::automatic) labelled = !parse_double(cells.back()).has_value() && cells.size() > 1;
            if (labelled && cells.size() < 2)
                throw data_error("csv line " + std::to_string(line_no) + ": label column but no numeric columns");
            if (out.header && out.header->size() != cells.size())
                throw data_error("csv line " + std::to_string(line_no) + ": row width differs from header");
        }
        if (cells.size() != *width)
            throw data_error("csv line " + std::to_string(line_no) + ": expected " + std::to_string(*width) +
                             " columns, found " + std::to_string(cells.size()));

        const std::size_t numeric = labelled ? cells.size() - 1 : cells.size();
        Vector x(numeric);
        for (std::size_t j = 0; j < numeric; ++j) {
            const auto v = parse_double(cells[j]);
            if (!v)
                throw data_error("csv row " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                                 ": malformed numeric cell '" + cells[j] + "'");
            x[j] = *v;
        }
        out.points.push_back(std::move(x));
        if (labelled) {
            if (!out.labels) out.labels.emplace();
            out.labels->push_back(cells.back());
        }
    }
    if (out.points.empty()) throw data_error("csv: no data rows");
    return out;
}

inline DeterministicData read_csv(const std::string& path, LabelMode mode = LabelMode::automatic) {
    std::istringstream in(read_file(path));
    return parse_csv(in, mode);
}

inline std::string format_csv(const DeterministicData& d) {
    std::ostringstream out;
    if (d.header) {
        for (std::size_t j = 0; j < d.header->size(); ++j) out << (j ? "," : "") << (*d.header)[j];
        out << '\n';
    }
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        for (std::size_t j = 0; j < d.points[i].size(); ++j) out << (j ? "," : "") << format_double(d.points[i][j]);
        if (d.labels) out << ',' << (*d.labels)[i];
        out << '\n';
    }
    return out.str();
}

/// Deterministic points as point-mass objects, ids = row index.
inline Dataset to_dataset(const DeterministicData& d) {
    std::vector<UncertainObject> objects;
    objects.reserve(d.points.size());
    for (std::size_t i = 0; i < d.points.size(); ++i)
        objects.push_back(UncertainObject::point(std::to_string(i), d.points[i]));
    return Dataset(std::move(objects), d.labels);
}

// ---------------------------------------------------------------------------
// Dataset JSON
// ---------------------------------------------------------------------------

inline json pdf_to_json(const PdfSpec& pdf) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformBox>)
                return {{"kind", "uniform"}, {"lo", p.box.lo}, {"hi", p.box.hi}};
            else if constexpr (std::is_same_v<T, TruncatedNormal>)
                return {{"kind", "normal"}, {"mean", p.mean}, {"stddev", p.stddev}, {"lo", p.box.lo}, {"hi", p.box.hi}};
            else if constexpr (std::is_same_v<T, TruncatedExponential>)
                return {{"kind", "exponential"}, {"origin", p.origin}, {"rate", p.rate},
                        {"lo", p.box.lo}, {"hi", p.box.hi}};
            else
                return {{"kind", "empirical"}, {"points", p.points}, {"weights", p.weights}};
        },
        pdf);
}

namespace detail {

inline Vector vec(const json& j, const char* key) {
    if (!j.contains(key)) throw data_error(std::string("missing field '") + key + "'");
    const json& a = j.at(key);
    if (!a.is_array()) throw data_error(std::string("field '") + key + "' must be an array");
    Vector v;
    v.reserve(a.size());
    for (const auto& x : a) {
        if (!x.is_number()) throw data_error(std::string("field '") + key + "' must hold numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

} // namespace detail

inline PdfSpec pdf_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw data_error("pdf must be an object with a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "uniform") return UniformBox{Box(detail::vec(j, "lo"), detail::vec(j, "hi"))};
        if (kind == "normal")
            return TruncatedNormal{detail::vec(j, "mean"), detail::vec(j, "stddev"),
                                   Box(detail::vec(j, "lo"), detail::vec(j, "hi"))};
        if (kind == "exponential")
            return TruncatedExponential{detail::vec(j, "origin"), detail::vec(j, "rate"),
                                        Box(detail::vec(j, "lo"), detail::vec(j, "hi"))};
        if (kind == "empirical") {
            if (!j.contains("points") || !j.at("points").is_array()) throw data_error("missing field 'points'");
            Empirical e;
            for (const auto& p : j.at("points")) {
                if (!p.is_array()) throw data_error("empirical points must be arrays");
                Vector x;
                for (const auto& v : p) {
                    if (!v.is_number()) throw data_error("empirical points must hold numbers");
                    x.push_back(v.get<double>());
                }
                e.points.push_back(std::move(x));
            }
            e.weights = detail::vec(j, "weights");
            return e;
        }
    } catch (const argument_error& e) {
        throw data_error(e.what());
    }
    throw data_error("unknown pdf kind '" + kind + "'");
}

inline json dataset_to_json(const Dataset& d) {
    json objects = json::array();
    for (const auto& o : d) objects.push_back({{"id", o.id()}, {"pdf", pdf_to_json(o.pdf())}});
    json j = {{"m", d.dim()}, {"objects", std::move(objects)}};
    if (d.labels()) j["labels"] = *d.labels();
    return j;
}

inline Dataset dataset_from_json(const json& j) {
    if (!j.is_object()) throw data_error("dataset: top level must be an object");
    if (!j.contains("m") || !j.at("m").is_number_integer()) throw data_error("dataset: missing integer 'm'");
    const auto m = j.at("m").get<std::int64_t>();
    if (m < 1) throw data_error("dataset: 'm' must be at least 1");
    if (!j.contains("objects") || !j.at("objects").is_array()) throw data_error("dataset: missing 'objects' array");

    std::vector<UncertainObject> objects;
    std::size_t index = 0;
    for (const auto& o : j.at("objects")) {
        const std::string where = "dataset object " + std::to_string(index);
        if (!o.is_object() || !o.contains("id") || !o.contains("pdf")) throw data_error(where + ": needs 'id' and 'pdf'");
        std::string id = o.at("id").is_string() ? o.at("id").get<std::string>() : o.at("id").dump();
        try {
            PdfSpec pdf = pdf_from_json(o.at("pdf"));
            if (dimension(pdf) != static_cast<std::size_t>(m))
                throw data_error("dimensionality differs from 'm'");
            objects.emplace_back(std::move(id), std::move(pdf));
        } catch (const data_error& e) {
            throw data_error(where + ": " + e.what());
        } catch (const argument_error& e) {
            throw data_error(where + ": " + e.what());
        } catch (const degenerate_support_error& e) {
            throw data_error(where + ": " + e.what());
        }
        ++index;
    }
    if (objects.empty()) throw data_error("dataset: no objects");

    std::optional<Labels> labels;
    if (j.contains("labels") && !j.at("labels").is_null()) {
        if (!j.at("labels").is_array()) throw data_error("dataset: 'labels' must be an array");
        labels.emplace();
        for (const auto& l : j.at("labels")) labels->push_back(l.is_string() ? l.get<std::string>() : l.dump());
    }
    return Dataset(std::move(objects), std::move(labels));
}

inline Dataset read_dataset_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw data_error(path + ": " + e.what());
    }
    return dataset_from_json(j);
}

/// Dataset JSON, or a deterministic CSV (point-mass objects) by extension.
inline Dataset load_dataset(const std::string& path, LabelMode mode = LabelMode::automatic) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return to_dataset(read_csv(path, mode));
    return read_dataset_json(path);
}

// ---------------------------------------------------------------------------
// Assignment JSON
// ---------------------------------------------------------------------------

struct AssignmentFile {
    std::string algo;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    double objective = 0.0;
    std::size_t sweeps_used = 0;
    std::vector<double> trace;
    std::vector<std::string> ids;
    std::vector<std::size_t> clusters;
};

inline json assignment_to_json(const Dataset& data, const Clustering& c, std::string_view algo, std::uint64_t seed) {
    json rows = json::array();
    for (std::size_t i = 0; i < data.size(); ++i) rows.push_back({{"id", data[i].id()}, {"cluster", c.assignment[i]}});
    return {{"algo", algo},         {"k", c.k},
            {"seed", seed},         {"objective", c.objective},
            {"sweeps_used", c.sweeps_used}, {"trace", c.trace},
            {"assignment", std::move(rows)}};
}

inline AssignmentFile assignment_from_json(const json& j) {
    if (!j.is_object() || !j.contains("assignment") || !j.at("assignment").is_array() || !j.contains("k"))
        throw data_error("assignment: needs 'k' and an 'assignment' array");
    AssignmentFile a;
    a.algo = j.value("algo", std::string{});
    a.k = j.at("k").get<std::size_t>();
    a.seed = j.value("seed", std::uint64_t{0});
    a.objective = j.value("objective", 0.0);
    a.sweeps_used = j.value("sweeps_used", std::size_t{0});
    if (j.contains("trace")) a.trace = j.at("trace").get<std::vector<double>>();
    for (const auto& row : j.at("assignment")) {
        if (!row.is_object() || !row.contains("id") || !row.contains("cluster"))
            throw data_error("assignment: rows need 'id' and 'cluster'");
        a.ids.push_back(row.at("id").is_string() ? row.at("id").get<std::string>() : row.at("id").dump());
        const auto c = row.at("cluster").get<std::int64_t>();
        if (c < 0 || static_cast<std::size_t>(c) >= a.k) throw data_error("assignment: cluster index out of range");
        a.clusters.push_back(static_cast<std::size_t>(c));
    }
    return a;
}

inline AssignmentFile read_assignment(const std::string& path) {
    try {
        return assignment_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw data_error(path + ": " + e.what());
    }
}

/// Maps an assignment file onto dataset order; ids must match one to one.
inline std::vector<std::size_t> align_assignment(const Dataset& data, const AssignmentFile& a) {
    if (a.ids.size() != data.size())
        throw data_error("assignment has " + std::to_string(a.ids.size()) + " rows, dataset has " +
                         std::to_string(data.size()) + " objects");
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < a.ids.size(); ++i)
        if (!by_id.emplace(a.ids[i], a.clusters[i]).second) throw data_error("assignment: duplicate id " + a.ids[i]);
    std::vector<std::size_t> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto it = by_id.find(data[i].id());
        if (it == by_id.end()) throw data_error("assignment: no row for object id " + data[i].id());
        out[i] = it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline constexpr std::string_view kMetricsHeader = "dataset,algo,k,seed,f,intra,inter,q,theta,ms";

struct MetricsRow {
    std::string dataset;
    std::string algo;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    EvalReport report;
};

inline std::string format_metrics_row(const MetricsRow& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
    std::ostringstream out;
    out << r.dataset << ',' << r.algo << ',' << r.k << ',' << r.seed << ',' << opt(r.report.f_measure) << ','
        << format_double(r.report.intra) << ',' << format_double(r.report.inter) << ','
        << format_double(r.report.quality_q) << ',' << opt(r.report.theta) << ','
        << format_double(r.report.wall_time_ms);
    return out.str();
}

inline json report_to_json(const MetricsRow& r) {
    json j = {{"dataset", r.dataset},
              {"algo", r.algo},
              {"k", r.k},
              {"seed", r.seed},
              {"f", r.report.f_measure ? json(*r.report.f_measure) : json(nullptr)},
              {"intra", r.report.intra},
              {"inter", r.report.inter},
              {"inter_defined", r.report.inter_defined},
              {"q", r.report.quality_q},
              {"theta", r.report.theta ? json(*r.report.theta) : json(nullptr)},
              {"ms", r.report.wall_time_ms},
              {"normalization", r.report.normalization}};
    return j;
}

} // namespace ucpc::io
