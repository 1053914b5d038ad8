// SPDX-License-Identifier: Apache-2.0

#include "lamm/store/reports.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "lamm/errors.hpp"

namespace lamm::store {

namespace {

using nlohmann::json;

std::string num_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out + '\n';
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void require_keys(const json& j, std::initializer_list<const char*> keys, const std::string& kind) {
    for (const auto* k : keys)
        if (!j.contains(k)) throw DataError(kind + " report lacks field '" + k + "'");
}

void require_unit_interval(const json& j, const char* key) {
    const auto v = j.at(key).get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw DataError(std::string("field '") + key + "' outside [0, 1]");
}

std::string validate_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("not a recognized file: invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw DataError("JSON file has no report kind");
    const auto kind = j["kind"].get<std::string>();
    try {
        if (kind == "eval") {
            require_keys(j, {"accuracy", "n", "per_class", "fingerprint", "seeds"}, kind);
            require_unit_interval(j, "accuracy");
            std::size_t n = 0;
            double weighted = 0.0;
            for (const auto& c : j["per_class"]) {
                require_unit_interval(c, "accuracy");
                n += c.at("count").get<std::size_t>();
                weighted += c.at("accuracy").get<double>() * c.at("count").get<double>();
            }
            if (n != j["n"].get<std::size_t>()) throw DataError("eval report per-class counts do not sum to n");
            if (n > 0 && std::abs(weighted / static_cast<double>(n) - j["accuracy"].get<double>()) > 1e-9)
                throw DataError("eval report accuracy differs from the count-weighted per-class mean");
            return "eval report: accuracy " + num_text(j["accuracy"].get<double>()) + " over " + std::to_string(n) +
                   " items";
        }
        if (kind == "incremental") {
            require_keys(j, {"acc_set1_before", "acc_set2", "acc_set1_after", "degradation", "set1_rows_unchanged"},
                         kind);
            const auto d = j["acc_set1_before"].get<double>() - j["acc_set1_after"].get<double>();
            if (d != j["degradation"].get<double>()) throw DataError("incremental report degradation is inconsistent");
            return "incremental report: degradation " + num_text(d);
        }
        if (kind == "sweep") {
            require_keys(j, {"seeds", "rows"}, kind);
            return "sweep report: " + std::to_string(j["rows"].size()) + " shot rows";
        }
        if (kind == "ablation") {
            require_keys(j, {"seeds", "rows"}, kind);
            return "ablation report: " + std::to_string(j["rows"].size()) + " combinations";
        }
    } catch (const json::exception& e) {
        throw DataError(kind + " report has a malformed field: " + e.what());
    }
    throw DataError("unknown report kind '" + kind + "'");
}

std::string validate_csv(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    const auto cols = split_commas(header);
    std::string kind;
    if (header == "step,epoch,ce,wc,cos,kd,total,lr") {
        kind = "trace";
    } else if (header == "wc,cos,kd,accuracy") {
        kind = "ablation";
    } else if (cols.size() >= 3 && cols[0] == "shots" && cols[1] == "mean") {
        for (std::size_t i = 2; i < cols.size(); ++i)
            if (cols[i].rfind("seed_", 0) != 0) throw DataError("sweep table column '" + cols[i] + "' is not a seed");
        kind = "sweep";
    } else {
        throw DataError("not a recognized file: unknown magic or header '" + header.substr(0, 40) + "'");
    }
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto cells = split_commas(line);
        if (cells.size() != cols.size()) {
            throw DataError(kind + " table line " + std::to_string(rows + 1) + " has " + std::to_string(cells.size()) +
                            " fields, expected " + std::to_string(cols.size()));
        }
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || *end != '\0' || !std::isfinite(v))
                throw DataError(kind + " table line " + std::to_string(rows + 1) + " has non-numeric field '" + c + "'");
        }
    }
    return kind + " table: " + std::to_string(rows) + " rows";
}

}  // namespace

std::string eval_report_json(const EvalReport& r) {
    json per_class = json::array();
    for (std::size_t c = 0; c < r.categories.size(); ++c)
        per_class.push_back(
            {{"category", r.categories[c]}, {"accuracy", r.per_class_accuracy[c]}, {"count", r.per_class_count[c]}});
    json j = {{"kind", "eval"},       {"accuracy", r.accuracy},       {"n", r.n},
              {"per_class", per_class}, {"fingerprint", r.fingerprint}, {"seeds", r.seeds}};
    return j.dump(2) + "\n";
}

std::string incremental_report_json(const IncrementalReport& r, IncrementalMode mode) {
    json j = {{"kind", "incremental"},
              {"mode", mode == IncrementalMode::lamm ? "lamm" : "coop"},
              {"acc_set1_before", r.acc_set1_before},
              {"acc_set2", r.acc_set2},
              {"acc_set1_after", r.acc_set1_after},
              {"degradation", r.degradation},
              {"set1_rows_unchanged", r.set1_rows_unchanged},
              {"set1", r.set1},
              {"set2", r.set2}};
    return j.dump(2) + "\n";
}

std::string sweep_json(const SweepResult& sweep) {
    json rows = json::array();
    for (const auto& row : sweep.rows)
        rows.push_back({{"shots", row.shots}, {"mean", row.mean}, {"per_seed", row.per_seed}});
    json j = {{"kind", "sweep"}, {"seeds", sweep.seeds}, {"rows", rows}};
    return j.dump(2) + "\n";
}

std::string ablation_json(const std::vector<AblationRow>& rows, const std::vector<std::uint64_t>& seeds) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"wc", r.wc}, {"cos", r.cos}, {"kd", r.kd}, {"accuracy", r.accuracy}, {"per_seed", r.per_seed}});
    json j = {{"kind", "ablation"}, {"seeds", seeds}, {"rows", out}};
    return j.dump(2) + "\n";
}

std::string trace_csv(const TrainTrace& trace) {
    std::string out = "step,epoch,ce,wc,cos,kd,total,lr\n";
    for (const auto& s : trace.steps) {
        out += join_row({std::to_string(s.step), std::to_string(s.epoch), num_text(s.loss.ce), num_text(s.loss.wc),
                         num_text(s.loss.cos), num_text(s.loss.kd), num_text(s.loss.total), num_text(s.lr)});
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::vector<std::string> header{"shots", "mean"};
    for (auto s : sweep.seeds) header.push_back("seed_" + std::to_string(s));
    std::string out = join_row(header);
    for (const auto& row : sweep.rows) {
        std::vector<std::string> cells{std::to_string(row.shots), num_text(row.mean)};
        for (double a : row.per_seed) cells.push_back(num_text(a));
        out += join_row(cells);
    }
    return out;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "wc,cos,kd,accuracy\n";
    for (const auto& r : rows)
        out += join_row({r.wc ? "1" : "0", r.cos ? "1" : "0", r.kd ? "1" : "0", num_text(r.accuracy)});
    return out;
}

std::string validate_report_text(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) throw DataError("not a recognized file: empty");
    if (text[i] == '{') return validate_json(text);
    return validate_csv(text);
}

}  // namespace lamm::store
