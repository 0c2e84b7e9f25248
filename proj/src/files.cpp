#include "dmim/files.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "dmim/errors.hpp"

namespace dmim {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

long long parse_int_field(const std::string& field, int line, const char* what) {
    std::string t = trim(field);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ValidationError("line " + std::to_string(line) + ": " + what + " '" + t +
                              "' is not an integer");
    return value;
}

} // namespace

ReportMatrix parse_reports_csv(const std::string& path, int choices) {
    if (choices < 2) throw ParameterError("need at least 2 choices");
    std::string text = read_file(path);

    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }

    size_t header = 0;
    while (header < lines.size() && trim(lines[header]).empty()) ++header;
    if (header == lines.size() || trim(lines[header]) != "agent,task,answer")
        throw ValidationError(path + ": first line must be the header 'agent,task,answer'");

    struct Row {
        int agent;
        int task;
        int answer;
        int line;
    };
    std::vector<Row> rows;
    int max_agent = 0, max_task = 0;
    for (size_t k = header + 1; k < lines.size(); ++k) {
        if (trim(lines[k]).empty()) continue;
        const int line_no = static_cast<int>(k) + 1;
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            size_t comma = lines[k].find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(lines[k].substr(pos));
                break;
            }
            fields.push_back(lines[k].substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (fields.size() != 3)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected 3 comma-separated fields, got " +
                                  std::to_string(fields.size()));
        long long agent = parse_int_field(fields[0], line_no, "agent");
        long long task = parse_int_field(fields[1], line_no, "task");
        long long answer = parse_int_field(fields[2], line_no, "answer");
        if (agent < 1 || agent > 1'000'000)
            throw ValidationError("line " + std::to_string(line_no) + ": agent id " +
                                  std::to_string(agent) + " is outside 1..1000000");
        if (task < 1 || task > 100'000'000)
            throw ValidationError("line " + std::to_string(line_no) + ": task id " +
                                  std::to_string(task) + " is outside its range");
        if (answer < 1 || answer > choices)
            throw ValidationError("line " + std::to_string(line_no) + ": answer " +
                                  std::to_string(answer) + " is outside 1.." +
                                  std::to_string(choices));
        rows.push_back({static_cast<int>(agent), static_cast<int>(task),
                        static_cast<int>(answer), line_no});
        max_agent = std::max(max_agent, static_cast<int>(agent));
        max_task = std::max(max_task, static_cast<int>(task));
    }
    if (rows.empty()) throw ValidationError(path + ": no report rows");

    std::vector<int> entries(static_cast<size_t>(max_agent) * max_task, 0);
    std::vector<int> first_line(entries.size(), 0);
    for (const Row& r : rows) {
        size_t cell = static_cast<size_t>(r.agent - 1) * max_task + (r.task - 1);
        if (entries[cell] != 0)
            throw ValidationError("line " + std::to_string(r.line) +
                                  ": duplicate report for agent " + std::to_string(r.agent) +
                                  ", task " + std::to_string(r.task) + " (first on line " +
                                  std::to_string(first_line[cell]) + ")");
        entries[cell] = r.answer;
        first_line[cell] = r.line;
    }
    for (int a = 0; a < max_agent; ++a)
        for (int t = 0; t < max_task; ++t)
            if (entries[static_cast<size_t>(a) * max_task + t] == 0)
                throw ValidationError(path + ": no report for agent " + std::to_string(a + 1) +
                                      ", task " + std::to_string(t + 1));

    return {max_agent, max_task, choices, std::move(entries)};
}

namespace {

[[noreturn]] void key_error(const std::string& key_path, const std::string& message) {
    throw ValidationError(key_path + ": " + message);
}

double number_at(const json& v, const std::string& key_path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        size_t slash = s.find('/');
        if (slash == std::string::npos || slash == 0 || slash + 1 == s.size())
            key_error(key_path, "expected a number or a 'num/den' string, got '" + s + "'");
        BigInt num, den;
        try {
            num = BigInt(s.substr(0, slash));
            den = BigInt(s.substr(slash + 1));
        } catch (const std::exception&) {
            key_error(key_path, "cannot parse rational '" + s + "'");
        }
        if (den == 0) key_error(key_path, "zero denominator in '" + s + "'");
        return Rational(num, den).convert_to<double>();
    }
    key_error(key_path, "expected a number");
}

long long integer_at(const json& v, const std::string& key_path) {
    if (!v.is_number_integer())
        key_error(key_path, "expected an integer");
    return v.get<long long>();
}

std::vector<double> number_array_at(const json& v, const std::string& key_path) {
    if (!v.is_array()) key_error(key_path, "expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (size_t k = 0; k < v.size(); ++k)
        out.push_back(number_at(v[k], key_path + "[" + std::to_string(k) + "]"));
    return out;
}

RealMat matrix_at(const json& v, const std::string& key_path) {
    if (!v.is_array() || v.empty()) key_error(key_path, "expected an array of row arrays");
    const int rows = static_cast<int>(v.size());
    int cols = -1;
    std::vector<std::vector<double>> data;
    data.reserve(rows);
    for (int r = 0; r < rows; ++r) {
        std::vector<double> row =
            number_array_at(v[r], key_path + "[" + std::to_string(r) + "]");
        if (cols < 0) cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != cols)
            key_error(key_path, "rows differ in length");
        data.push_back(std::move(row));
    }
    RealMat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = data[r][c];
    return m;
}

const json& require_key(const json& obj, const char* key, const std::string& key_path) {
    auto it = obj.find(key);
    if (it == obj.end()) key_error(key_path.empty() ? key : key_path + "." + key, "missing");
    return *it;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& key_path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok)
            key_error(key_path.empty() ? it.key() : key_path + "." + it.key(),
                      "unknown key");
    }
}

WorldModel world_at(const json& v, const std::string& key_path) {
    if (!v.is_object()) key_error(key_path, "expected an object");
    std::string type = require_key(v, "type", key_path).get<std::string>();
    if (type == "full_joint") {
        reject_unknown_keys(v, {"type", "agents", "choices", "table"}, key_path);
        int agents = static_cast<int>(integer_at(require_key(v, "agents", key_path),
                                                 key_path + ".agents"));
        int choices = static_cast<int>(integer_at(require_key(v, "choices", key_path),
                                                  key_path + ".choices"));
        std::vector<double> table =
            number_array_at(require_key(v, "table", key_path), key_path + ".table");
        return WorldModel(FullJoint(agents, choices, std::move(table)));
    }
    if (type == "ground_truth") {
        reject_unknown_keys(v, {"type", "choices", "g", "confusion"}, key_path);
        int choices = static_cast<int>(integer_at(require_key(v, "choices", key_path),
                                                  key_path + ".choices"));
        std::vector<double> g =
            number_array_at(require_key(v, "g", key_path), key_path + ".g");
        const json& confs = require_key(v, "confusion", key_path);
        if (!confs.is_array()) key_error(key_path + ".confusion", "expected an array");
        std::vector<TransitionMatrix> confusion;
        confusion.reserve(confs.size());
        for (size_t k = 0; k < confs.size(); ++k) {
            RealMat m = matrix_at(confs[k],
                                  key_path + ".confusion[" + std::to_string(k) + "]");
            confusion.emplace_back(m.rows(), std::move(m));
        }
        return WorldModel(GroundTruth(Marginal(choices, std::move(g)),
                                      std::move(confusion)));
    }
    key_error(key_path + ".type", "expected 'full_joint' or 'ground_truth', got '" + type +
                                      "'");
}

} // namespace

TrialConfig parse_sim_config(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(path + ": config must be an object");
    reject_unknown_keys(doc,
                        {"world", "strategies", "T", "split", "trials", "seed",
                         "alpha_thresholds", "threads"},
                        "");

    WorldModel world = world_at(require_key(doc, "world", ""), "world");
    const int n = world.agents();
    const int c = world.choices();

    const json& strat = require_key(doc, "strategies", "");
    StrategyProfile strategies = truthful_profile(n, c);
    if (strat.is_string()) {
        if (strat.get<std::string>() != "truthful")
            key_error("strategies", "expected 'truthful' or an array of matrices");
    } else if (strat.is_array()) {
        std::vector<TransitionMatrix> s;
        s.reserve(strat.size());
        for (size_t k = 0; k < strat.size(); ++k) {
            RealMat m = matrix_at(strat[k], "strategies[" + std::to_string(k) + "]");
            if (m.rows() != c)
                key_error("strategies[" + std::to_string(k) + "]",
                          "matrix size disagrees with the world's choice count");
            s.emplace_back(c, std::move(m));
        }
        if (static_cast<int>(s.size()) != n)
            key_error("strategies", "expected " + std::to_string(n) + " matrices, got " +
                                        std::to_string(s.size()));
        strategies = StrategyProfile(std::move(s));
    } else {
        key_error("strategies", "expected 'truthful' or an array of matrices");
    }

    long long tasks = integer_at(require_key(doc, "T", ""), "T");
    if (tasks < 2 || tasks > 10'000'000) key_error("T", "task count outside its range");

    const json& split_spec = require_key(doc, "split", "");
    TaskSplit split = [&]() -> TaskSplit {
        if (split_spec.is_string()) {
            if (split_spec.get<std::string>() != "half")
                key_error("split", "expected 'half' or an array of one-based task ids");
            return default_split(static_cast<int>(tasks), c);
        }
        if (!split_spec.is_array())
            key_error("split", "expected 'half' or an array of one-based task ids");
        std::vector<int> first;
        first.reserve(split_spec.size());
        for (size_t k = 0; k < split_spec.size(); ++k) {
            long long id = integer_at(split_spec[k], "split[" + std::to_string(k) + "]");
            first.push_back(static_cast<int>(id) - 1);
        }
        return TaskSplit(static_cast<int>(tasks), std::move(first));
    }();

    long long trials = integer_at(require_key(doc, "trials", ""), "trials");
    if (trials < 1) throw ParameterError("trials: need at least 1");

    const json& seed_val = require_key(doc, "seed", "");
    std::uint64_t seed = 0;
    if (seed_val.is_number_unsigned()) {
        seed = seed_val.get<std::uint64_t>();
    } else if (seed_val.is_number_integer() && seed_val.get<long long>() >= 0) {
        seed = static_cast<std::uint64_t>(seed_val.get<long long>());
    } else if (seed_val.is_string()) {
        const std::string s = seed_val.get<std::string>();
        size_t used = 0;
        try {
            seed = std::stoull(s, &used);
        } catch (const std::exception&) {
            key_error("seed", "cannot parse '" + s + "' as an unsigned integer");
        }
        if (used != s.size()) key_error("seed", "cannot parse '" + s + "'");
    } else {
        key_error("seed", "expected a non-negative integer");
    }

    std::vector<double> alphas;
    if (auto it = doc.find("alpha_thresholds"); it != doc.end())
        alphas = number_array_at(*it, "alpha_thresholds");

    int threads = 0;
    if (auto it = doc.find("threads"); it != doc.end()) {
        threads = static_cast<int>(integer_at(*it, "threads"));
        if (threads < 0) key_error("threads", "must be non-negative");
    }

    return TrialConfig{std::move(world), std::move(strategies), std::move(split),
                       trials,           seed,                  std::move(alphas),
                       threads};
}

RealMat parse_matrix_file(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return matrix_at(doc, path);
}

std::string fmt_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ValidationError("failed writing " + path);
}

} // namespace dmim
