#include "lprx/model_io.hpp"

#include "lprx/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace lprx {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Byte offset -> line and column.
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t k = 0; k < end; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON ("
                         + e.what() + ")");
    }
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& message) const
    {
        throw ParseError(source_ + ": at " + path + ": " + message);
    }

    const json& member(const json& obj, const std::string& path, const char* key) const
    {
        if (!obj.is_object()) {
            fail(path, "expected an object");
        }
        auto it = obj.find(key);
        if (it == obj.end()) {
            fail(path, std::string("missing field \"") + key + "\"");
        }
        return *it;
    }

    const json& array(const json& value, const std::string& path) const
    {
        if (!value.is_array()) {
            fail(path, "expected an array");
        }
        return value;
    }

    /// Strings verbatim, integers in decimal.
    std::string label(const json& value, const std::string& path) const
    {
        if (value.is_string()) {
            return value.get<std::string>();
        }
        if (value.is_number_integer()) {
            return std::to_string(value.get<long long>());
        }
        fail(path, "expected a string or integer label");
    }

    double weight(const json& value, const std::string& path) const
    {
        if (value.is_number()) {
            return value.get<double>();
        }
        if (value.is_string()) {
            const auto s = value.get<std::string>();
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != s.size()) {
                fail(path, "weight \"" + s + "\" is not a decimal number");
            }
            return v;
        }
        fail(path, "expected a decimal weight");
    }

private:
    std::string source_;
};

std::string at(const std::string& base, const char* key) { return base + "." + key; }
std::string at(const std::string& base, std::size_t index) { return base + "[" + std::to_string(index) + "]"; }

std::vector<EvidenceTable> read_evidence(const Reader& rd, const json& list, const std::string& path,
                                         const std::vector<std::string>& names, const std::vector<Alphabet>& alphabets)
{
    std::vector<EvidenceTable> evidence;
    rd.array(list, path);
    for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string p = at(path, k);
        const std::string id = rd.label(rd.member(list[k], p, "id"), at(p, "id"));
        auto it = std::find(names.begin(), names.end(), id);
        if (it == names.end()) {
            rd.fail(at(p, "id"), "unknown variable \"" + id + "\"");
        }
        const auto var = static_cast<VariableId>(it - names.begin());
        const json& weights = rd.member(list[k], p, "weights");
        const std::string wp = at(p, "weights");
        if (!weights.is_object()) {
            rd.fail(wp, "expected an object mapping symbols to weights");
        }
        const Alphabet& alphabet = alphabets[var];
        std::vector<double> w(alphabet.size(), 0.0);
        std::vector<bool> seen(alphabet.size(), false);
        for (const auto& [symbol, value] : weights.items()) {
            const auto index = alphabet.index_of(symbol);
            if (!index) {
                rd.fail(wp, "symbol \"" + symbol + "\" is not in the alphabet of \"" + id + "\"");
            }
            w[*index] = rd.weight(value, wp + "." + symbol);
            seen[*index] = true;
        }
        for (std::size_t a = 0; a < seen.size(); ++a) {
            if (!seen[a]) {
                rd.fail(wp, "no weight for symbol \"" + alphabet.symbol(a) + "\"");
            }
        }
        try {
            evidence.push_back(EvidenceTable::from_weights(var, w));
        } catch (const ValidationError& e) {
            rd.fail(wp, e.what());
        }
    }
    return evidence;
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

FactorGraphModel parse_model_json(std::string_view text, const std::string& source)
{
    const json doc = parse_json(text, source);
    const Reader rd(source);
    if (!doc.is_object()) {
        rd.fail("$", "expected a top-level object");
    }
    std::vector<std::string> names;
    std::vector<Alphabet> alphabets;
    const json& vars = rd.array(rd.member(doc, "$", "variables"), "$.variables");
    for (std::size_t k = 0; k < vars.size(); ++k) {
        const std::string p = at("$.variables", k);
        names.push_back(rd.label(rd.member(vars[k], p, "id"), at(p, "id")));
        const json& alpha = rd.array(rd.member(vars[k], p, "alphabet"), at(p, "alphabet"));
        std::vector<std::string> symbols;
        for (std::size_t a = 0; a < alpha.size(); ++a) {
            symbols.push_back(rd.label(alpha[a], at(at(p, "alphabet"), a)));
        }
        try {
            alphabets.emplace_back(std::move(symbols));
        } catch (const ValidationError& e) {
            rd.fail(at(p, "alphabet"), e.what());
        }
    }
    std::map<std::string, VariableId> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!index.emplace(names[i], i).second) {
            rd.fail(at(at("$.variables", i), "id"), "duplicate variable id \"" + names[i] + "\"");
        }
    }
    std::vector<LocalBehaviour> behaviours;
    const json& behs = rd.array(rd.member(doc, "$", "behaviours"), "$.behaviours");
    for (std::size_t k = 0; k < behs.size(); ++k) {
        const std::string p = at("$.behaviours", k);
        LocalBehaviour beh;
        const json& scope = rd.array(rd.member(behs[k], p, "scope"), at(p, "scope"));
        for (std::size_t s = 0; s < scope.size(); ++s) {
            const std::string id = rd.label(scope[s], at(at(p, "scope"), s));
            auto it = index.find(id);
            if (it == index.end()) {
                rd.fail(at(at(p, "scope"), s), "unknown variable \"" + id + "\"");
            }
            beh.scope.push_back(it->second);
        }
        const json& allowed = rd.array(rd.member(behs[k], p, "allowed"), at(p, "allowed"));
        for (std::size_t t = 0; t < allowed.size(); ++t) {
            const std::string tp = at(at(p, "allowed"), t);
            const json& tuple = rd.array(allowed[t], tp);
            if (tuple.size() != beh.scope.size()) {
                rd.fail(tp, "tuple arity " + std::to_string(tuple.size()) + " does not match the scope size "
                                + std::to_string(beh.scope.size()));
            }
            Tuple row;
            for (std::size_t s = 0; s < tuple.size(); ++s) {
                const std::string symbol = rd.label(tuple[s], at(tp, s));
                const auto sym = alphabets[beh.scope[s]].index_of(symbol);
                if (!sym) {
                    rd.fail(at(tp, s), "symbol \"" + symbol + "\" is not in the alphabet of \""
                                           + names[beh.scope[s]] + "\"");
                }
                row.push_back(*sym);
            }
            beh.allowed.push_back(std::move(row));
        }
        behaviours.push_back(std::move(beh));
    }
    auto evidence = read_evidence(rd, rd.member(doc, "$", "evidence"), "$.evidence", names, alphabets);
    try {
        return FactorGraphModel(std::move(alphabets), std::move(behaviours), std::move(evidence), std::move(names));
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

FactorGraphModel load_model(const std::string& path)
{
    return parse_model_json(read_text_file(path), path);
}

std::string model_to_json(const FactorGraphModel& model)
{
    nlohmann::ordered_json doc;
    doc["variables"] = nlohmann::ordered_json::array();
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        doc["variables"].push_back({{"id", model.name(i)}, {"alphabet", model.alphabet(i).symbols()}});
    }
    doc["behaviours"] = nlohmann::ordered_json::array();
    for (const auto& beh : model.behaviours()) {
        nlohmann::ordered_json scope = nlohmann::ordered_json::array();
        for (VariableId i : beh.scope) {
            scope.push_back(model.name(i));
        }
        nlohmann::ordered_json allowed = nlohmann::ordered_json::array();
        for (const auto& t : beh.allowed) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (std::size_t s = 0; s < t.size(); ++s) {
                row.push_back(model.alphabet(beh.scope[s]).symbol(t[s]));
            }
            allowed.push_back(std::move(row));
        }
        doc["behaviours"].push_back({{"scope", std::move(scope)}, {"allowed", std::move(allowed)}});
    }
    doc["evidence"] = nlohmann::ordered_json::array();
    for (const auto& e : model.evidence_tables()) {
        nlohmann::ordered_json weights = nlohmann::ordered_json::object();
        for (SymbolIndex a = 0; a < e.size(); ++a) {
            weights[model.alphabet(e.variable()).symbol(a)] = format_double(e.weight(a));
        }
        doc["evidence"].push_back({{"id", model.name(e.variable())}, {"weights", std::move(weights)}});
    }
    return doc.dump(2) + "\n";
}

std::vector<EvidenceTable> parse_evidence_json(const FactorGraphModel& model, std::string_view text,
                                               const std::string& source)
{
    const json doc = parse_json(text, source);
    const Reader rd(source);
    std::vector<std::string> names;
    std::vector<Alphabet> alphabets;
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        names.push_back(model.name(i));
        alphabets.push_back(model.alphabet(i));
    }
    if (doc.is_array()) {
        return read_evidence(rd, doc, "$", names, alphabets);
    }
    return read_evidence(rd, rd.member(doc, "$", "evidence"), "$.evidence", names, alphabets);
}

LpPoint parse_point_json(const LinearProgram& program, std::string_view text, const std::string& source)
{
    const json doc = parse_json(text, source);
    const Reader rd(source);
    const json& values = rd.member(doc, "$", "values");
    if (!values.is_object()) {
        rd.fail("$.values", "expected an object mapping variable names to rationals");
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < program.num_variables(); ++k) {
        index.emplace(to_string(program.variables[k]), k);
    }
    LpPoint point;
    point.values.assign(program.num_variables(), Rational(0));
    for (const auto& [name, value] : values.items()) {
        auto it = index.find(name);
        if (it == index.end()) {
            rd.fail("$.values", "unknown variable \"" + name + "\"");
        }
        try {
            point.values[it->second] =
                value.is_string() ? parse_rational(value.get<std::string>()) : parse_rational(value.dump());
        } catch (const Error& e) {
            rd.fail("$.values." + name, e.what());
        }
    }
    return point;
}

std::string point_to_json(const LinearProgram& program, const LpPoint& point)
{
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < program.num_variables(); ++k) {
        if (!is_zero(point.values.at(k))) {
            values[to_string(program.variables[k])] = to_string(point.values[k]);
        }
    }
    nlohmann::ordered_json doc;
    doc["values"] = std::move(values);
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ": cannot open for reading");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(path + ": cannot open for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(path + ": write failed");
    }
}

} // namespace lprx
