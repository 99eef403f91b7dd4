#include "cotlift/systemfile.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cotlift {

namespace {

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

struct Line {
    std::string text;
    int number;
};

struct ActionBlock {
    std::string name;
    int line = 0;
    GroupSpec group;
    std::vector<std::string> base;
    std::vector<std::string> periodic;
    std::vector<std::pair<Expr, int>> maps;
};

}  // namespace

const std::string* ExperimentConfig::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    return v ? std::strtod(v->c_str(), nullptr) : fallback;
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
    const std::string* v = find(key);
    return v ? std::strtol(v->c_str(), nullptr, 10) : fallback;
}

const Expr* SystemFile::find_function(const std::string& name) const {
    for (const auto& [n, e] : functions)
        if (n == name) return &e;
    return nullptr;
}

const ActionSpec* SystemFile::find_action(const std::string& name) const {
    for (const auto& [n, a] : actions)
        if (n == name) return &a;
    return nullptr;
}

MomentMapSystem SystemFile::system() const {
    if (!chart) throw ValidationError("system file has no chart block");
    std::vector<Expr> comps;
    for (const auto& [n, e] : functions) comps.push_back(e);
    return MomentMapSystem::make(*chart, comps);
}

SystemFile parse_system_file(const std::string& text) {
    std::vector<Line> lines;
    {
        std::istringstream is(text);
        std::string raw;
        int number = 0;
        while (std::getline(is, raw)) {
            ++number;
            lines.push_back({raw, number});
        }
    }

    SystemFile file;
    std::vector<std::string> chart_positions, chart_momenta, chart_periodic;
    bool saw_chart = false;
    int chart_line = 0;

    std::size_t i = 0;
    auto next_content = [&]() -> std::optional<Line> {
        while (i < lines.size()) {
            std::string body = trim(strip_comment(lines[i].text));
            int number = lines[i].number;
            ++i;
            if (!body.empty()) return Line{body, number};
        }
        return std::nullopt;
    };

    while (auto line = next_content()) {
        const std::string& body = line->text;
        auto words = split_ws(body);
        if (words.empty()) continue;

        if (words[0] == "chart") {
            if (body.find('{') == std::string::npos)
                throw ParseError(line->number, 1, "expected '{' after 'chart'");
            saw_chart = true;
            chart_line = line->number;
            while (auto inner = next_content()) {
                if (inner->text == "}") break;
                auto colon = inner->text.find(':');
                if (colon == std::string::npos)
                    throw ParseError(inner->number, 1, "expected 'key: values' inside chart block");
                std::string key = trim(inner->text.substr(0, colon));
                auto values = split_ws(inner->text.substr(colon + 1));
                if (key == "positions")
                    chart_positions = values;
                else if (key == "momenta")
                    chart_momenta = values;
                else if (key == "periodic")
                    chart_periodic = values;
                else
                    throw ParseError(inner->number, 1, "unknown chart key '" + key + "'");
            }
            continue;
        }

        if (words[0] == "function") {
            auto eq = body.find('=');
            if (eq == std::string::npos || words.size() < 2)
                throw ParseError(line->number, 1, "expected 'function NAME = expression'");
            std::string name = words[1];
            if (!name.empty() && name.back() == '=') name.pop_back();
            name = trim(name);
            std::string expr_text = body.substr(eq + 1);
            int col0 = static_cast<int>(eq) + 2;
            Expr e = parse_expression_at(expr_text, line->number, col0);
            for (const auto& [n, _] : file.functions)
                if (n == name)
                    throw ParseError(line->number, 1, "duplicate function '" + name + "'");
            file.functions.emplace_back(name, e);
            continue;
        }

        if (words[0] == "action") {
            if (words.size() < 2 || body.find('{') == std::string::npos)
                throw ParseError(line->number, 1, "expected 'action NAME {'");
            ActionBlock block;
            block.name = words[1];
            block.line = line->number;
            while (auto inner = next_content()) {
                if (inner->text == "}") break;
                auto colon = inner->text.find(':');
                if (colon == std::string::npos)
                    throw ParseError(inner->number, 1,
                                     "expected 'key: values' inside action block");
                std::string key = trim(inner->text.substr(0, colon));
                std::string rest = trim(inner->text.substr(colon + 1));
                if (key == "group") {
                    auto values = split_ws(rest);
                    if (values.size() < 2)
                        throw ParseError(inner->number, 1,
                                         "expected 'group: circle|torus|lines NAMES...'");
                    std::vector<std::string> params(values.begin() + 1, values.end());
                    GroupSpec part;
                    if (values[0] == "circle") {
                        if (params.size() != 1)
                            throw ParseError(inner->number, 1, "circle takes one parameter name");
                        part = GroupSpec::circle(params[0]);
                    } else if (values[0] == "torus") {
                        part = GroupSpec::torus(params);
                    } else if (values[0] == "lines" || values[0] == "line") {
                        part = GroupSpec::real_line(params);
                    } else {
                        throw ParseError(inner->number, 1,
                                         "unknown group kind '" + values[0] + "'");
                    }
                    block.group = GroupSpec::product(block.group, part);
                } else if (key == "base") {
                    block.base = split_ws(rest);
                } else if (key == "periodic") {
                    block.periodic = split_ws(rest);
                } else if (key == "map") {
                    int col0 = static_cast<int>(colon) + 2;
                    block.maps.emplace_back(parse_expression_at(rest, inner->number, col0),
                                            inner->number);
                } else {
                    throw ParseError(inner->number, 1, "unknown action key '" + key + "'");
                }
            }
            if (block.base.empty())
                throw ParseError(block.line, 1, "action block needs a 'base:' line");
            if (block.maps.size() != block.base.size())
                throw ParseError(block.line, 1, "action needs one 'map:' line per base variable");
            std::vector<bool> periodic(block.base.size(), false);
            for (const auto& p : block.periodic) {
                bool known = false;
                for (std::size_t b = 0; b < block.base.size(); ++b) {
                    if (block.base[b] == p) {
                        periodic[b] = true;
                        known = true;
                    }
                }
                if (!known)
                    throw ParseError(block.line, 1,
                                     "periodic name '" + p + "' is not a base variable");
            }
            std::vector<Expr> comps;
            for (auto& [e, _] : block.maps) comps.push_back(e);
            try {
                ActionSpec spec =
                    ActionSpec::make(block.group, block.base, periodic, std::move(comps));
                for (const auto& [n, _] : file.actions)
                    if (n == block.name)
                        throw ParseError(block.line, 1, "duplicate action '" + block.name + "'");
                file.actions.emplace_back(block.name, std::move(spec));
            } catch (const ValidationError& e) {
                throw ParseError(block.line, 1,
                                 "action '" + block.name + "' invalid: " + e.what());
            }
            continue;
        }

        if (words[0] == "experiment") {
            if (words.size() < 2 || body.find('{') == std::string::npos)
                throw ParseError(line->number, 1, "expected 'experiment NAME {'");
            ExperimentConfig exp;
            exp.name = words[1];
            exp.line = line->number;
            while (auto inner = next_content()) {
                if (inner->text == "}") break;
                auto colon = inner->text.find(':');
                if (colon == std::string::npos)
                    throw ParseError(inner->number, 1,
                                     "expected 'key: value' inside experiment block");
                exp.entries.emplace_back(trim(inner->text.substr(0, colon)),
                                         trim(inner->text.substr(colon + 1)));
            }
            file.experiments.push_back(std::move(exp));
            continue;
        }

        throw ParseError(line->number, 1, "unknown top-level directive '" + words[0] + "'");
    }

    if (saw_chart) {
        if (chart_positions.empty())
            throw ParseError(chart_line, 1, "chart block needs a 'positions:' line");
        if (chart_momenta.empty())
            for (const auto& q : chart_positions) chart_momenta.push_back("p_" + q);
        std::vector<bool> periodic(chart_positions.size(), false);
        for (const auto& p : chart_periodic) {
            bool known = false;
            for (std::size_t b = 0; b < chart_positions.size(); ++b) {
                if (chart_positions[b] == p) {
                    periodic[b] = true;
                    known = true;
                }
            }
            if (!known)
                throw ParseError(chart_line, 1, "periodic name '" + p + "' is not a position");
        }
        try {
            file.chart = DarbouxChart::make(chart_positions, chart_momenta, periodic);
        } catch (const ValidationError& e) {
            throw ParseError(chart_line, 1, std::string("chart invalid: ") + e.what());
        }
    }

    // Chart-dependent validation of functions.
    if (file.chart) {
        for (const auto& [name, e] : file.functions) {
            for (const auto& v : e.free_variables())
                if (!file.chart->has_coord(v))
                    throw ParseError(1, 1, "function '" + name + "' uses unknown variable '" + v +
                                               "'");
        }
    }

    // Every name referenced by an experiment must resolve.
    for (const auto& exp : file.experiments) {
        for (const char* key : {"action1", "action2", "action"}) {
            if (const std::string* v = exp.find(key)) {
                if (!file.find_action(*v))
                    throw ParseError(exp.line, 1, "experiment '" + exp.name +
                                                      "' references unknown action '" + *v + "'");
            }
        }
        if (const std::string* v = exp.find("function")) {
            if (!file.find_function(*v))
                throw ParseError(exp.line, 1, "experiment '" + exp.name +
                                                  "' references unknown function '" + *v + "'");
        }
    }
    return file;
}

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open system file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_system_file(buffer.str());
}

}  // namespace cotlift
