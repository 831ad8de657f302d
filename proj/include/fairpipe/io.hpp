#ifndef FAIRPIPE_IO_HPP
#define FAIRPIPE_IO_HPP

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairpipe/distribution.hpp"
#include "fairpipe/errors.hpp"
#include "fairpipe/groups.hpp"
#include "fairpipe/hiring.hpp"
#include "fairpipe/pipeline.hpp"
#include "fairpipe/rational.hpp"

namespace fairpipe {
namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            return out;
        }
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
}

inline bool parse_bit(const std::string& field, std::size_t line, const char* what) {
    if (field == "0") return false;
    if (field == "1") return true;
    throw ParseError(line, std::string(what) + " must be 0 or 1, got '" + field + "'");
}

inline std::uint64_t parse_count(const std::string& field, std::size_t line, const char* what) {
    if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(line, std::string(what) + " must be a nonnegative integer, got '" +
                                   field + "'");
    try {
        return std::stoull(field);
    } catch (const std::exception&) {
        throw ParseError(line, std::string(what) + " is out of range: '" + field + "'");
    }
}

}  // namespace detail

// -- Population files ----------------------------------------------------------
//
// Comma-separated with header  id,group,truth_1,...,truth_T  and one row per
// individual. Truth bits are 0/1.

struct PopulationFile {
    std::vector<Record> records;
    std::size_t num_stages = 0;
};

inline PopulationFile load_population(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    PopulationFile out;

    if (!std::getline(in, line)) throw ParseError(1, "empty population file");
    ++lineno;
    std::vector<std::string> header = detail::split_fields(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "group")
        throw ParseError(lineno, "population header must start with id,group,truth_1");
    for (std::size_t i = 2; i < header.size(); ++i) {
        std::string want = "truth_" + std::to_string(i - 1);
        if (header[i] != want)
            throw ParseError(lineno, "expected column '" + want + "', got '" + header[i] + "'");
    }
    out.num_stages = header.size() - 2;

    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f = detail::split_fields(line);
        if (f.size() != header.size())
            throw ParseError(lineno, "expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(f.size()));
        Record r;
        r.id = f[0];
        r.group = f[1];
        if (r.id.empty()) throw ParseError(lineno, "empty id");
        if (r.group.empty()) throw ParseError(lineno, "empty group");
        for (std::size_t i = 2; i < f.size(); ++i)
            r.truths.push_back(detail::parse_bit(f[i], lineno, "truth bit") ? 1 : 0);
        out.records.push_back(std::move(r));
    }
    return out;
}

inline PopulationFile load_population_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open population file '" + path + "'");
    return load_population(in);
}

inline void write_population(std::ostream& out, const std::vector<Record>& records,
                             std::size_t num_stages) {
    out << "id,group";
    for (std::size_t t = 1; t <= num_stages; ++t) out << ",truth_" << t;
    out << "\n";
    for (const Record& r : records) {
        out << r.id << "," << r.group;
        for (std::size_t t = 0; t < num_stages; ++t)
            out << "," << (t < r.truths.size() && r.truths[t] ? 1 : 0);
        out << "\n";
    }
}

// -- Outcome files ---------------------------------------------------------------
//
// One row per record:
//   id,group,status,failed_at,truth_1..truth_T,decision_1..decision_T
// Unreached stages leave their decision cells empty; failed_at is empty for
// records that passed. Truth bits ride along so a file is auditable on its
// own.

inline void write_outcomes(std::ostream& out, const OutcomeTable& table) {
    std::size_t T = table.num_stages();
    out << "id,group,status,failed_at";
    for (std::size_t t = 1; t <= T; ++t) out << ",truth_" << t;
    for (std::size_t t = 1; t <= T; ++t) out << ",decision_" << t;
    out << "\n";
    for (const OutcomeRow& row : table.rows()) {
        out << row.record.id << "," << row.record.group << ","
            << (row.outcome.passed() ? "PASSED" : "FAIL") << ",";
        if (row.outcome.failed_at) out << *row.outcome.failed_at;
        for (std::size_t t = 0; t < T; ++t)
            out << "," << (t < row.record.truths.size() && row.record.truths[t] ? 1 : 0);
        for (std::size_t t = 0; t < T; ++t) {
            out << ",";
            if (t < row.outcome.stage_decisions.size()) out << row.outcome.stage_decisions[t];
        }
        out << "\n";
    }
}

inline OutcomeTable load_outcomes(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty outcomes file");
    ++lineno;
    std::vector<std::string> header = detail::split_fields(line);
    if (header.size() < 6 || header[0] != "id" || header[1] != "group" ||
        header[2] != "status" || header[3] != "failed_at" || (header.size() - 4) % 2 != 0)
        throw ParseError(lineno,
                         "outcomes header must be id,group,status,failed_at,truth_*,decision_*");
    std::size_t T = (header.size() - 4) / 2;
    for (std::size_t t = 1; t <= T; ++t) {
        if (header[3 + t] != "truth_" + std::to_string(t) ||
            header[3 + T + t] != "decision_" + std::to_string(t))
            throw ParseError(lineno, "outcomes header columns do not match truth_1.." +
                                         std::to_string(T) + ",decision_1.." + std::to_string(T));
    }

    std::vector<OutcomeRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f = detail::split_fields(line);
        if (f.size() != header.size())
            throw ParseError(lineno, "expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(f.size()));
        OutcomeRow row;
        row.record.id = f[0];
        row.record.group = f[1];
        if (row.record.id.empty()) throw ParseError(lineno, "empty id");
        if (row.record.group.empty()) throw ParseError(lineno, "empty group");
        bool passed;
        if (f[2] == "PASSED")
            passed = true;
        else if (f[2] == "FAIL")
            passed = false;
        else
            throw ParseError(lineno, "status must be PASSED or FAIL, got '" + f[2] + "'");
        for (std::size_t t = 0; t < T; ++t)
            row.record.truths.push_back(
                detail::parse_bit(f[4 + t], lineno, "truth bit") ? 1 : 0);

        std::size_t reached = T;
        if (passed) {
            if (!f[3].empty()) throw ParseError(lineno, "failed_at must be empty on PASSED rows");
        } else {
            std::uint64_t at = detail::parse_count(f[3], lineno, "failed_at");
            if (at < 1 || at > T)
                throw ParseError(lineno, "failed_at " + f[3] + " outside [1, " +
                                             std::to_string(T) + "]");
            reached = static_cast<std::size_t>(at);
            row.outcome.failed_at = reached;
        }
        row.outcome.status = passed ? Status::Passed : Status::Fail;
        for (std::size_t t = 0; t < T; ++t) {
            const std::string& cell = f[4 + T + t];
            if (t < reached) {
                if (cell.empty())
                    throw ParseError(lineno, "missing decision_" + std::to_string(t + 1));
                try {
                    std::size_t used = 0;
                    row.outcome.stage_decisions.push_back(std::stoi(cell, &used));
                    if (used != cell.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    throw ParseError(lineno, "decision_" + std::to_string(t + 1) +
                                                 " must be an integer, got '" + cell + "'");
                }
            } else if (!cell.empty()) {
                throw ParseError(lineno, "decision_" + std::to_string(t + 1) +
                                             " must be empty past the failed stage");
            }
        }
        if (passed) row.outcome.final_decision = row.outcome.stage_decisions.back();
        rows.push_back(std::move(row));
    }
    return OutcomeTable(T, std::move(rows));
}

inline OutcomeTable load_outcomes_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open outcomes file '" + path + "'");
    return load_outcomes(in);
}

// -- Joint distribution files ----------------------------------------------------
//
// Header  group,x,y,xhat,yhat,mass  with one row per cell. x/y are the two
// truth bits, xhat/yhat the two decision bits. Lines starting with '#' are
// comments; cells not listed carry zero mass; masses may be rationals like
// 3/50 or decimals and need not sum to one (the loader normalizes).

struct DistributionComments {
    std::vector<std::string> lines;
};

inline JointDistribution<Rational> load_distribution(
    std::istream& in, std::optional<std::string> majority = std::nullopt) {
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    std::vector<std::string> group_order;
    std::map<std::string, std::size_t> group_index;
    // masses keyed by (group index, cell index within group)
    std::map<std::pair<std::size_t, std::size_t>, Rational> masses;

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> f = detail::split_fields(t);
        if (!saw_header) {
            if (f != std::vector<std::string>{"group", "x", "y", "xhat", "yhat", "mass"})
                throw ParseError(lineno, "distribution header must be group,x,y,xhat,yhat,mass");
            saw_header = true;
            continue;
        }
        if (f.size() != 6)
            throw ParseError(lineno, "expected 6 fields, got " + std::to_string(f.size()));
        if (f[0].empty()) throw ParseError(lineno, "empty group");
        auto [it, fresh] = group_index.try_emplace(f[0], group_order.size());
        if (fresh) group_order.push_back(f[0]);
        bool x = detail::parse_bit(f[1], lineno, "x");
        bool y = detail::parse_bit(f[2], lineno, "y");
        bool xhat = detail::parse_bit(f[3], lineno, "xhat");
        bool yhat = detail::parse_bit(f[4], lineno, "yhat");
        Rational mass;
        try {
            mass = parse_rational(f[5]);
        } catch (const ParseError& e) {
            throw ParseError(lineno, e.what());
        }
        if (mass < 0) throw ParseError(lineno, "negative mass");
        std::size_t cell =
            JointDistribution<Rational>::index_of(0, x, y, xhat, yhat);  // offset added below
        auto key = std::make_pair(it->second, cell);
        if (!masses.emplace(key, mass).second)
            throw ParseError(lineno, "duplicate cell for group '" + f[0] + "'");
    }
    if (!saw_header) throw ParseError(lineno == 0 ? 1 : lineno, "missing distribution header");
    if (group_order.empty()) throw ParseError(lineno, "no distribution rows");

    std::string maj = majority.value_or(group_order.front());
    GroupSet groups(group_order, maj);  // throws if the label is absent
    DistributionBuilder<Rational> builder(groups);
    for (const auto& [key, mass] : masses) {
        std::size_t g = groups.index_of(group_order[key.first]);
        builder.set(g, (key.second >> 3) & 1, (key.second >> 2) & 1, (key.second >> 1) & 1,
                    key.second & 1, mass);
    }
    return builder.build_normalized();
}

inline JointDistribution<Rational> load_distribution_file(
    const std::string& path, std::optional<std::string> majority = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open distribution file '" + path + "'");
    return load_distribution(in, std::move(majority));
}

/// Writes the nonzero cells in group-major, cell-index order. Comment lines
/// go first, each prefixed with "# ".
template <class T>
void write_distribution(std::ostream& out, const JointDistribution<T>& dist,
                        const DistributionComments& comments = {}) {
    for (const std::string& c : comments.lines) out << "# " << c << "\n";
    out << "group,x,y,xhat,yhat,mass\n";
    dist.for_each_cell([&](const Cell& c, const T& m) {
        if (ScalarTraits<T>::is_zero(m)) return;
        out << dist.groups().label(c.group) << "," << c.truth1 << "," << c.truth2 << ","
            << c.pos1 << "," << c.pos2 << "," << format_scalar(m) << "\n";
    });
}

// -- Scenario configs --------------------------------------------------------------
//
// Plain  key = value  lines with '#' comments. Recognized keys:
//   n_majority n_minority n_interview n_hire   counts
//   eps delta qualification_rate               rationals (e.g.  -2/3  or  0.5)
//   model                                      bernoulli | quota
//   trials seed                                simulation controls
// Every key is optional; omitted keys keep the defaults below.

struct ScenarioRun {
    HiringScenario scenario;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
};

inline ScenarioRun load_scenario(std::istream& in) {
    ScenarioRun out;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(lineno, "expected key = value");
        if (!seen.insert(key).second) throw ParseError(lineno, "duplicate key '" + key + "'");

        auto rational_value = [&] {
            try {
                return parse_rational(value);
            } catch (const ParseError& e) {
                throw ParseError(lineno, e.what());
            }
        };
        if (key == "n_majority")
            out.scenario.n_majority =
                static_cast<std::int64_t>(detail::parse_count(value, lineno, key.c_str()));
        else if (key == "n_minority")
            out.scenario.n_minority =
                static_cast<std::int64_t>(detail::parse_count(value, lineno, key.c_str()));
        else if (key == "n_interview")
            out.scenario.n_interview =
                static_cast<std::int64_t>(detail::parse_count(value, lineno, key.c_str()));
        else if (key == "n_hire")
            out.scenario.n_hire =
                static_cast<std::int64_t>(detail::parse_count(value, lineno, key.c_str()));
        else if (key == "eps")
            out.scenario.eps = rational_value();
        else if (key == "delta")
            out.scenario.delta = rational_value();
        else if (key == "qualification_rate")
            out.scenario.qualification_rate = rational_value();
        else if (key == "model") {
            if (value == "bernoulli")
                out.scenario.model = SamplingModel::Bernoulli;
            else if (value == "quota")
                out.scenario.model = SamplingModel::FixedQuota;
            else
                throw ParseError(lineno, "model must be bernoulli or quota, got '" + value + "'");
        } else if (key == "trials")
            out.trials = detail::parse_count(value, lineno, key.c_str());
        else if (key == "seed")
            out.seed = detail::parse_count(value, lineno, key.c_str());
        else
            throw ParseError(lineno, "unknown key '" + key + "'");
    }
    return out;
}

inline ScenarioRun load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    return load_scenario(in);
}

}  // namespace fairpipe

#endif  // FAIRPIPE_IO_HPP
