#include "hyag/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <utility>

namespace hyag {

ScenarioError::ScenarioError(int line_, int column_, const std::string& msg)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + msg : msg),
      line(line_),
      column(column_) {}

Value Value::of(const std::string& s) {
    Value v;
    v.str = s;
    return v;
}

Value Value::of(double d) {
    Value v;
    v.kind = number;
    v.num = d;
    return v;
}

Value Value::of_bool(bool b) {
    Value v;
    v.kind = boolean;
    v.flag = b;
    return v;
}

Value Value::of(const std::vector<double>& xs) {
    Value v;
    v.kind = array;
    for (double x : xs) v.items.push_back(of(x));
    return v;
}

Value Value::of(const std::vector<std::string>& xs) {
    Value v;
    v.kind = array;
    for (const auto& x : xs) v.items.push_back(of(x));
    return v;
}

std::string Value::render() const {
    switch (kind) {
        case string: {
            std::string out = "\"";
            for (char c : str) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            return out + "\"";
        }
        case number: return render_real(num);
        case boolean: return flag ? "true" : "false";
        case array: {
            std::string out = "[";
            for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i].render();
            return out + "]";
        }
    }
    return "";
}

bool Value::operator==(const Value& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case string: return str == o.str;
        case number: return num == o.num;
        case boolean: return flag == o.flag;
        case array: return items == o.items;
    }
    return false;
}

const Value& Task::at(const std::string& k) const {
    auto it = args.find(k);
    if (it == args.end()) throw ScenarioError(line, 1, "task '" + name + "' is missing '" + k + "'");
    return it->second;
}

std::string Task::text(const std::string& k, const std::string& dflt) const { return has(k) ? at(k).str : dflt; }
double Task::number(const std::string& k, double dflt) const { return has(k) ? at(k).num : dflt; }
bool Task::flag(const std::string& k, bool dflt) const { return has(k) ? at(k).flag : dflt; }

Vec Task::numbers(const std::string& k) const {
    Vec out;
    for (const Value& v : at(k).items) out.push_back(v.num);
    return out;
}

namespace {

struct Entry {
    std::string key;
    Value value;
    int line;
};

struct Table {
    std::string kind, name;
    int line = 0;
    std::vector<Entry> entries;
};

// ---- lexing -----------------------------------------------------------------

class LineParser {
public:
    LineParser(const std::string& s, int line) : s_(s), line_(line) {}

    Value value() {
        skip_ws();
        if (pos_ >= s_.size()) fail("expected a value");
        Value v;
        v.line = line_;
        v.column = col();
        char c = s_[pos_];
        if (c == '"') {
            ++pos_;
            std::string out;
            while (true) {
                if (pos_ >= s_.size()) fail("unterminated string");
                char d = s_[pos_++];
                if (d == '"') break;
                if (d == '\\') {
                    if (pos_ >= s_.size()) fail("unterminated escape");
                    char e = s_[pos_++];
                    if (e == 'n') out += '\n';
                    else if (e == 't') out += '\t';
                    else if (e == '"' || e == '\\') out += e;
                    else fail("unknown escape \\" + std::string(1, e));
                } else {
                    out += d;
                }
            }
            v.str = out;
        } else if (c == '[') {
            ++pos_;
            v.kind = Value::array;
            skip_ws();
            while (pos_ < s_.size() && s_[pos_] != ']') {
                Value item = value();
                if (item.kind == Value::array) fail("nested arrays are not supported");
                v.items.push_back(std::move(item));
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                } else if (pos_ >= s_.size() || s_[pos_] != ']') {
                    fail("expected ',' or ']'");
                }
            }
            if (pos_ >= s_.size()) fail("unterminated array");
            ++pos_;
        } else {
            std::size_t start = pos_;
            while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ',' && s_[pos_] != ']') ++pos_;
            std::string tok = s_.substr(start, pos_ - start);
            if (tok == "true" || tok == "false") {
                v.kind = Value::boolean;
                v.flag = tok == "true";
            } else {
                v.kind = Value::number;
                if (tok == "inf" || tok == "+inf") v.num = kInf;
                else if (tok == "-inf") v.num = -kInf;
                else {
                    char* end = nullptr;
                    v.num = std::strtod(tok.c_str(), &end);
                    if (tok.empty() || end != tok.c_str() + tok.size() || std::isnan(v.num))
                        throw ScenarioError(line_, static_cast<int>(start) + 1, "bad value '" + tok + "'");
                }
            }
        }
        return v;
    }

    void expect_end() {
        skip_ws();
        if (pos_ < s_.size()) fail("unexpected text after value");
    }

    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(line_, col(), msg); }

private:
    int col() const { return static_cast<int>(pos_) + 1; }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    const std::string& s_;
    int line_;
};

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_str && c == '\\') { ++i; continue; }
        if (c == '"') in_str = !in_str;
        if (c == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

bool bare_name(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

std::vector<Table> lex(const std::string& text) {
    std::vector<Table> tables;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_comment(raw);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::size_t last = line.find_last_not_of(" \t\r");
        std::string body = line.substr(first, last - first + 1);
        int col0 = static_cast<int>(first) + 1;
        if (body.rfind("[[", 0) == 0) {
            if (body.size() < 4 || body.compare(body.size() - 2, 2, "]]") != 0) throw ScenarioError(lineno, col0, "malformed array table header");
            std::string name = body.substr(2, body.size() - 4);
            if (name != "task") throw ScenarioError(lineno, col0 + 2, "only [[task]] array tables are allowed");
            tables.push_back({"task", "", lineno, {}});
            continue;
        }
        if (body[0] == '[') {
            if (body.back() != ']') throw ScenarioError(lineno, col0, "malformed table header");
            std::string name = body.substr(1, body.size() - 2);
            std::string kind = name, sub;
            auto dot = name.find('.');
            if (dot != std::string::npos) {
                kind = name.substr(0, dot);
                sub = name.substr(dot + 1);
            }
            if (kind == "policy") {
                if (!sub.empty()) throw ScenarioError(lineno, col0 + 1, "[policy] takes no name");
            } else if (kind == "system" || kind == "contract" || kind == "input") {
                if (!bare_name(sub)) throw ScenarioError(lineno, col0 + 1, "table [" + kind + ".<name>] needs a plain name");
            } else {
                throw ScenarioError(lineno, col0 + 1, "unknown table '" + name + "'");
            }
            if (!seen.insert(name).second) throw ScenarioError(lineno, col0, "duplicate table [" + name + "]");
            tables.push_back({kind, sub, lineno, {}});
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos) throw ScenarioError(lineno, col0, "expected 'key = value'");
        std::string key = body.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        if (!bare_name(key)) throw ScenarioError(lineno, col0, "bad key '" + key + "'");
        if (tables.empty()) throw ScenarioError(lineno, col0, "key '" + key + "' outside any table");
        for (const Entry& e : tables.back().entries)
            if (e.key == key) throw ScenarioError(lineno, col0, "duplicate key '" + key + "'");
        std::string rest = line.substr(0, line.find_last_not_of(" \t\r") + 1);
        LineParser lp(rest, lineno);
        lp.pos_ = first + eq + 1;
        Value v = lp.value();
        lp.expect_end();
        tables.back().entries.push_back({key, std::move(v), lineno});
    }
    return tables;
}

// ---- building ---------------------------------------------------------------

[[noreturn]] void fail_at(const Value& v, const std::string& msg) { throw ScenarioError(v.line, v.column, msg); }

const Value& need_kind(const Value& v, Value::Kind k, const std::string& key) {
    static const char* names[] = {"a string", "a number", "a boolean", "an array"};
    if (v.kind != k) fail_at(v, "'" + key + "' must be " + names[k]);
    return v;
}

int as_count(const Value& v, const std::string& key, int min) {
    need_kind(v, Value::number, key);
    if (v.num != std::floor(v.num) || v.num < min || v.num > 1e9) fail_at(v, "'" + key + "' must be an integer >= " + std::to_string(min));
    return static_cast<int>(v.num);
}

BoxSet set_of(const Value& v, std::size_t dims, const std::string& key) {
    need_kind(v, Value::string, key);
    try {
        BoxSet s = parse_box(v.str, dims);
        if (s.dims() != dims)
            fail_at(v, "'" + key + "' has dimension " + std::to_string(s.dims()) + ", expected " + std::to_string(dims));
        return s;
    } catch (const std::invalid_argument& e) {
        fail_at(v, "'" + key + "': " + e.what());
    }
}

VecExpr expr_of(const Value& v, std::size_t n, std::size_t m, std::size_t out, const std::string& key) {
    need_kind(v, Value::string, key);
    try {
        return parse_vec_expr(v.str, n, m, out);
    } catch (const std::invalid_argument& e) {
        fail_at(v, "'" + key + "': " + e.what());
    }
}

bool is_policy_key(const std::string& k) {
    static const std::set<std::string> keys{"dt", "event_tol", "overlap_rule", "max_time", "max_jumps", "max_branches",
                                            "align_coincident_jumps", "kickstart", "zeno_window", "zeno_threshold"};
    return keys.count(k) > 0;
}

void apply_policy(SimPolicy& p, const std::string& key, const Value& v) {
    if (key == "dt") p.dt = need_kind(v, Value::number, key).num;
    else if (key == "event_tol") p.event_tol = need_kind(v, Value::number, key).num;
    else if (key == "max_time") p.max_time = need_kind(v, Value::number, key).num;
    else if (key == "zeno_window") p.zeno_window = need_kind(v, Value::number, key).num;
    else if (key == "max_jumps") p.max_jumps = as_count(v, key, 0);
    else if (key == "max_branches") p.max_branches = as_count(v, key, 1);
    else if (key == "zeno_threshold") p.zeno_threshold = as_count(v, key, 1);
    else if (key == "align_coincident_jumps") p.align_coincident_jumps = need_kind(v, Value::boolean, key).flag;
    else if (key == "kickstart") p.kickstart = need_kind(v, Value::boolean, key).flag;
    else if (key == "overlap_rule") {
        try {
            p.overlap_rule = parse_overlap(need_kind(v, Value::string, key).str);
        } catch (const std::invalid_argument& e) {
            fail_at(v, e.what());
        }
    } else {
        fail_at(v, "unknown policy key '" + key + "'");
    }
    try {
        check_policy(p);
    } catch (const std::invalid_argument& e) {
        fail_at(v, e.what());
    }
}

HybridSystemDesc build_system(const Table& t) {
    std::map<std::string, const Value*> kv;
    for (const Entry& e : t.entries) kv[e.key] = &e.value;
    static const std::set<std::string> known{"dims", "W", "X", "Y", "C", "D", "X0", "F", "G", "h", "lipschitz", "basic_conditions"};
    for (const Entry& e : t.entries)
        if (!known.count(e.key)) fail_at(e.value, "unknown system key '" + e.key + "'");
    auto need = [&](const char* k) -> const Value& {
        auto it = kv.find(k);
        if (it == kv.end()) throw ScenarioError(t.line, 1, "system '" + t.name + "' is missing '" + k + "'");
        return *it->second;
    };
    HybridSystemDesc d;
    d.name = t.name;
    const Value& dims = need_kind(need("dims"), Value::array, "dims");
    if (dims.items.size() != 3) fail_at(dims, "'dims' must be [m, n, p]");
    d.m = static_cast<std::size_t>(as_count(dims.items[0], "dims", 0));
    d.n = static_cast<std::size_t>(as_count(dims.items[1], "dims", 1));
    d.p = static_cast<std::size_t>(as_count(dims.items[2], "dims", 0));
    d.W = set_of(need("W"), d.m, "W");
    d.X = set_of(need("X"), d.n, "X");
    d.Y = set_of(need("Y"), d.p, "Y");
    d.X0 = set_of(need("X0"), d.n, "X0");
    for (auto [key, target] : {std::pair{"C", &d.C}, std::pair{"D", &d.D}}) {
        const Value& v = need(key);
        need_kind(v, Value::string, key);
        try {
            *target = parse_box(v.str, d.n);
        } catch (const std::invalid_argument& e) {
            fail_at(v, std::string("'") + key + "': " + e.what());
        }
    }
    for (auto [key, target] : {std::pair{"F", &d.F}, std::pair{"G", &d.G}}) {
        auto it = kv.find(key);
        if (it == kv.end()) continue;
        need_kind(*it->second, Value::array, key);
        for (const Value& item : it->second->items) target->push_back(expr_of(item, d.n, d.m, d.n, key));
    }
    d.h = expr_of(need("h"), d.n, d.m, d.p, "h");
    if (kv.count("lipschitz")) d.lipschitz = need_kind(*kv["lipschitz"], Value::boolean, "lipschitz").flag;
    if (kv.count("basic_conditions")) d.basic_conditions = need_kind(*kv["basic_conditions"], Value::boolean, "basic_conditions").flag;
    try {
        validate(d);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(t.line, 1, "system '" + t.name + "': " + e.what());
    } catch (const EvalError& e) {
        throw ScenarioError(t.line, 1, "system '" + t.name + "': " + e.what());
    }
    return d;
}

struct ArgSpec {
    const char* name;
    Value::Kind kind;
    bool required;
};

const std::map<std::string, std::vector<ArgSpec>>& task_specs() {
    using K = Value::Kind;
    static const std::map<std::string, std::vector<ArgSpec>> specs{
        {"simulate", {{"system", K::string, true}, {"input", K::string, false}, {"feedback", K::boolean, false},
                      {"x0", K::array, false}, {"schedule", K::array, false}, {"horizon", K::number, false}}},
        {"check_weak", {{"system", K::string, true}, {"contract", K::string, true}, {"input", K::string, false},
                        {"feedback", K::boolean, false}, {"x0", K::array, false}, {"schedule", K::array, false},
                        {"horizon", K::number, false}}},
        {"check_strong", {{"system", K::string, true}, {"contract", K::string, true}, {"input", K::string, false},
                          {"feedback", K::boolean, false}, {"x0", K::array, false}, {"schedule", K::array, false},
                          {"horizon", K::number, false}, {"delta_min", K::number, false}}},
        {"lift", {{"contract", K::string, true}, {"beta", K::number, true}, {"eps", K::number, true},
                  {"system", K::string, true}, {"as", K::string, true}, {"input", K::string, false},
                  {"feedback", K::boolean, false}, {"x0", K::array, false}}},
        {"cascade", {{"first", K::string, true}, {"second", K::string, true}, {"c1", K::string, false},
                     {"c2", K::string, false}, {"input", K::string, true}, {"x01", K::array, false},
                     {"x02", K::array, false}, {"check", K::string, false}, {"delta_min", K::number, false}}},
        {"feedback", {{"system", K::string, true}, {"contract", K::string, false}, {"x0", K::array, false},
                      {"check", K::string, false}, {"delta_min", K::number, false}}},
        {"invariance", {{"system", K::string, true}, {"contract", K::string, true}, {"K", K::string, true},
                        {"boundary_resolution", K::number, false}, {"aw_resolution", K::number, false},
                        {"jumpset_resolution", K::number, false}, {"cone_tol", K::number, false}}},
        {"harness", {{"theorem", K::string, true}, {"system", K::string, false}, {"contract", K::string, false},
                     {"declared_strong", K::boolean, false}, {"delta_min", K::number, false},
                     {"switch_time", K::number, false}, {"resolution", K::number, false}, {"first", K::string, false},
                     {"second", K::string, false}, {"c1", K::string, false}, {"c2", K::string, false},
                     {"input", K::string, false}, {"x01", K::array, false}, {"x02", K::array, false}}},
        {"shared_domain", {{"times1", K::array, true}, {"times2", K::array, true}, {"align", K::boolean, false}}},
    };
    return specs;
}

bool safe_name(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

class TaskChecker {
public:
    TaskChecker(const Scenario& s) : s_(s) {
        for (const auto& [name, c] : s.contracts) contracts_[name] = &c;
    }

    void check(const Task& t) {
        for (const auto& [k, v] : t.args)
            if (v.kind == Value::array && (k == "x0" || k == "x01" || k == "x02" || k == "schedule" || k == "times1" || k == "times2"))
                for (const Value& item : v.items)
                    if (item.kind != Value::number) fail_at(item, "'" + k + "' must hold numbers");
        if (t.kind == "simulate" || t.kind == "check_weak" || t.kind == "check_strong" || t.kind == "lift") {
            const HybridSystemDesc& d = system(t, "system");
            bool fb = t.flag("feedback", false);
            if (fb && t.has("input")) fail_at(t.at("input"), "'input' and 'feedback' are exclusive");
            if (!fb && !t.has("input") && t.kind != "lift") throw ScenarioError(t.line, 1, "task '" + t.name + "' needs 'input' or 'feedback = true'");
            if (t.has("input")) input(t, "input", d.m);
            if (fb && (d.p != d.m || !subset(d.Y, d.W))) throw ScenarioError(t.line, 1, "task '" + t.name + "': system cannot be fed back");
            if (t.has("x0")) state(t, "x0", d.n);
            if (t.has("schedule") != t.has("horizon")) throw ScenarioError(t.line, 1, "'schedule' and 'horizon' go together");
            if (t.has("contract")) contract(t, "contract", d);
            if (t.kind == "lift") {
                std::string as = t.text("as");
                if (!bare_name(as) || contracts_.count(as)) fail_at(t.at("as"), "'as' must be a new contract name");
                made_.push_back(std::make_unique<AGContract>(*contracts_.at(t.text("contract"))));
                contracts_[as] = made_.back().get();
            }
        } else if (t.kind == "cascade") {
            const HybridSystemDesc& d1 = system(t, "first");
            const HybridSystemDesc& d2 = system(t, "second");
            input(t, "input", d1.m);
            if (t.has("x01")) state(t, "x01", d1.n);
            if (t.has("x02")) state(t, "x02", d2.n);
            if (t.has("c1")) contract(t, "c1", d1);
            if (t.has("c2")) contract(t, "c2", d2);
            std::string c = t.text("check", "none");
            if (c != "none" && c != "weak" && c != "strong") fail_at(t.at("check"), "check must be none, weak or strong");
            if (c != "none" && !(t.has("c1") && t.has("c2"))) throw ScenarioError(t.line, 1, "cascade checks need c1 and c2");
        } else if (t.kind == "feedback") {
            const HybridSystemDesc& d = system(t, "system");
            if (t.has("x0")) state(t, "x0", d.n);
            if (t.has("contract")) contract(t, "contract", d);
            std::string c = t.text("check", "none");
            if (c != "none" && c != "state" && c != "weak" && c != "strong") fail_at(t.at("check"), "check must be none, state, weak or strong");
            if (c != "none" && !t.has("contract")) throw ScenarioError(t.line, 1, "feedback checks need a contract");
        } else if (t.kind == "invariance") {
            const HybridSystemDesc& d = system(t, "system");
            contract(t, "contract", d);
            set_of(t.at("K"), d.n, "K");
            for (const char* k : {"boundary_resolution", "aw_resolution", "jumpset_resolution"})
                if (t.has(k)) as_count(t.at(k), k, 1);
        } else if (t.kind == "harness") {
            std::string th = t.text("theorem");
            if (th == "feedback") {
                const HybridSystemDesc& d = system(t, "system");
                contract(t, "contract", d);
                if (t.has("resolution")) as_count(t.at("resolution"), "resolution", 1);
            } else if (th == "cascade") {
                const HybridSystemDesc& d1 = system(t, "first");
                const HybridSystemDesc& d2 = system(t, "second");
                contract(t, "c1", d1);
                contract(t, "c2", d2);
                input(t, "input", d1.m);
                if (t.has("x01")) state(t, "x01", d1.n);
                if (t.has("x02")) state(t, "x02", d2.n);
            } else {
                fail_at(t.at("theorem"), "theorem must be cascade or feedback");
            }
        }
    }

private:
    const HybridSystemDesc& system(const Task& t, const std::string& key) {
        const Value& v = t.at(key);
        auto it = s_.systems.find(v.str);
        if (it == s_.systems.end()) fail_at(v, "undeclared system '" + v.str + "'");
        return it->second;
    }

    void contract(const Task& t, const std::string& key, const HybridSystemDesc& d) {
        const Value& v = t.at(key);
        auto it = contracts_.find(v.str);
        if (it == contracts_.end()) fail_at(v, "undeclared contract '" + v.str + "'");
        const AGContract& c = *it->second;
        if (c.AW.dims() != d.m || c.GX.dims() != d.n || c.GY.dims() != d.p)
            fail_at(v, "contract '" + v.str + "' does not match the alphabets of system '" + d.name + "'");
    }

    void input(const Task& t, const std::string& key, std::size_t m) {
        const Value& v = t.at(key);
        auto it = s_.inputs.find(v.str);
        if (it == s_.inputs.end()) fail_at(v, "undeclared input '" + v.str + "'");
        if (it->second.size() != m) fail_at(v, "input '" + v.str + "' has the wrong dimension");
    }

    void state(const Task& t, const std::string& key, std::size_t n) {
        const Value& v = t.at(key);
        if (v.items.size() != n) fail_at(v, "'" + key + "' must have " + std::to_string(n) + " entries");
    }

    const Scenario& s_;
    std::map<std::string, const AGContract*> contracts_;
    std::vector<std::unique_ptr<AGContract>> made_;
};

Task build_task(const Table& tb, std::size_t index) {
    Task t;
    t.line = tb.line;
    for (const Entry& e : tb.entries) {
        if (e.key == "kind") t.kind = need_kind(e.value, Value::string, "kind").str;
        else if (e.key == "name") t.name = need_kind(e.value, Value::string, "name").str;
        t.args[e.key] = e.value;
    }
    if (t.kind.empty()) throw ScenarioError(tb.line, 1, "task without 'kind'");
    const auto& specs = task_specs();
    auto it = specs.find(t.kind);
    if (it == specs.end()) fail_at(t.args.at("kind"), "unknown task kind '" + t.kind + "'");
    if (t.name.empty()) t.name = "t" + std::to_string(index + 1) + "_" + t.kind;
    if (!safe_name(t.name)) fail_at(t.args.at("name"), "task name must use letters, digits, '_', '-' or '.'");
    t.args.erase("kind");
    t.args.erase("name");
    for (const auto& [k, v] : t.args) {
        if (is_policy_key(k)) {
            SimPolicy scratch;
            apply_policy(scratch, k, v);
            continue;
        }
        auto spec = std::find_if(it->second.begin(), it->second.end(), [&](const ArgSpec& a) { return k == a.name; });
        if (spec == it->second.end()) fail_at(v, "task kind '" + t.kind + "' has no argument '" + k + "'");
        need_kind(v, spec->kind, k);
    }
    for (const ArgSpec& a : it->second)
        if (a.required && !t.has(a.name)) throw ScenarioError(tb.line, 1, "task '" + t.name + "' is missing '" + a.name + "'");
    return t;
}

}  // namespace

const std::vector<std::string>& task_kinds() {
    static const std::vector<std::string> kinds = [] {
        std::vector<std::string> k;
        for (const auto& [name, spec] : task_specs()) k.push_back(name);
        return k;
    }();
    return kinds;
}

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::vector<Table> tables = lex(text);
    // Systems first: contracts and inputs are checked against them by tasks only.
    for (const Table& t : tables) {
        if (t.kind == "policy") {
            for (const Entry& e : t.entries) apply_policy(s.policy, e.key, e.value);
        } else if (t.kind == "system") {
            s.systems[t.name] = build_system(t);
        } else if (t.kind == "contract") {
            std::map<std::string, const Value*> kv;
            for (const Entry& e : t.entries) {
                if (e.key != "AW" && e.key != "GX" && e.key != "GY") fail_at(e.value, "unknown contract key '" + e.key + "'");
                kv[e.key] = &e.value;
            }
            for (const char* k : {"AW", "GX", "GY"})
                if (!kv.count(k)) throw ScenarioError(t.line, 1, "contract '" + t.name + "' is missing '" + k + "'");
            auto parse = [&](const char* k) {
                const Value& v = need_kind(*kv[k], Value::string, k);
                try {
                    return parse_box(v.str);
                } catch (const std::invalid_argument& e) {
                    fail_at(v, std::string("'") + k + "': " + e.what());
                }
            };
            s.contracts[t.name] = AGContract{parse("AW"), parse("GX"), parse("GY")};
        } else if (t.kind == "input") {
            if (t.entries.size() != 1 || t.entries[0].key != "expr") throw ScenarioError(t.line, 1, "input '" + t.name + "' takes exactly one key, 'expr'");
            const Value& v = need_kind(t.entries[0].value, Value::string, "expr");
            s.inputs[t.name] = expr_of(v, 0, 0, split_components(v.str).size(), "expr");
        }
    }
    std::set<std::string> names;
    for (const Table& t : tables) {
        if (t.kind != "task") continue;
        Task task = build_task(t, s.tasks.size());
        if (!names.insert(task.name).second) throw ScenarioError(t.line, 1, "duplicate task name '" + task.name + "'");
        s.tasks.push_back(std::move(task));
    }
    TaskChecker checker(s);
    for (const Task& t : s.tasks) checker.check(t);
    return s;
}

std::string render_scenario(const Scenario& s) {
    std::ostringstream out;
    const SimPolicy& p = s.policy;
    out << "[policy]\n"
        << "dt = " << render_real(p.dt) << "\n"
        << "event_tol = " << render_real(p.event_tol) << "\n"
        << "overlap_rule = \"" << (p.overlap_rule == OverlapRule::jump_priority ? "jump" : p.overlap_rule == OverlapRule::flow_priority ? "flow" : "enumerate") << "\"\n"
        << "max_time = " << render_real(p.max_time) << "\n"
        << "max_jumps = " << p.max_jumps << "\n"
        << "max_branches = " << p.max_branches << "\n"
        << "align_coincident_jumps = " << (p.align_coincident_jumps ? "true" : "false") << "\n"
        << "kickstart = " << (p.kickstart ? "true" : "false") << "\n"
        << "zeno_window = " << render_real(p.zeno_window) << "\n"
        << "zeno_threshold = " << p.zeno_threshold << "\n";
    for (const auto& [name, d] : s.systems) {
        out << "\n[system." << name << "]\n"
            << "dims = [" << d.m << ", " << d.n << ", " << d.p << "]\n";
        for (auto [k, set] : {std::pair{"W", &d.W}, std::pair{"X", &d.X}, std::pair{"Y", &d.Y}, std::pair{"C", &d.C},
                              std::pair{"D", &d.D}, std::pair{"X0", &d.X0}})
            out << k << " = " << Value::of(render_box(*set)).render() << "\n";
        for (auto [k, maps] : {std::pair{"F", &d.F}, std::pair{"G", &d.G}}) {
            std::vector<std::string> srcs;
            for (const auto& f : *maps) srcs.push_back(render_vec_expr(f));
            out << k << " = " << Value::of(srcs).render() << "\n";
        }
        out << "h = " << Value::of(render_vec_expr(d.h)).render() << "\n"
            << "lipschitz = " << (d.lipschitz ? "true" : "false") << "\n"
            << "basic_conditions = " << (d.basic_conditions ? "true" : "false") << "\n";
    }
    for (const auto& [name, c] : s.contracts) {
        out << "\n[contract." << name << "]\n"
            << "AW = " << Value::of(render_box(c.AW)).render() << "\n"
            << "GX = " << Value::of(render_box(c.GX)).render() << "\n"
            << "GY = " << Value::of(render_box(c.GY)).render() << "\n";
    }
    for (const auto& [name, e] : s.inputs) out << "\n[input." << name << "]\nexpr = " << Value::of(render_vec_expr(e)).render() << "\n";
    for (const Task& t : s.tasks) {
        out << "\n[[task]]\nkind = " << Value::of(t.kind).render() << "\nname = " << Value::of(t.name).render() << "\n";
        for (const auto& [k, v] : t.args) out << k << " = " << v.render() << "\n";
    }
    return out.str();
}

SimPolicy task_policy(const Scenario& s, const Task& t) {
    SimPolicy p = s.policy;
    for (const auto& [k, v] : t.args)
        if (is_policy_key(k)) apply_policy(p, k, v);
    return p;
}

}  // namespace hyag
