#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "mbt/model_io.hpp"

namespace mbt {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string attr(const pt::ptree& el, const std::string& name) {
    auto attrs = el.get_child_optional("<xmlattr>");
    if (!attrs) return "";
    // '.' is the ptree path separator and appears in "attr.name"
    auto it = attrs->find(name);
    return it == attrs->not_found() ? "" : it->second.data();
}

// yEd puts the visible text in *NodeLabel / *EdgeLabel elements; plain
// GraphML keeps it directly in <data>. Prefer the former.
std::optional<std::string> find_label_element(const pt::ptree& el) {
    for (const auto& [name, child] : el) {
        if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
        if (ends_with(name, "NodeLabel") || ends_with(name, "EdgeLabel")) {
            std::string text = trim(child.data());
            if (!text.empty()) return text;
        }
        if (auto nested = find_label_element(child)) return nested;
    }
    return std::nullopt;
}

std::optional<std::string> first_text(const pt::ptree& el) {
    for (const auto& [name, child] : el) {
        if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
        std::string text = trim(child.data());
        if (!text.empty() && child.size() == (child.count("<xmlattr>") ? 1u : 0u)) return text;
        if (auto nested = first_text(child)) return nested;
    }
    return std::nullopt;
}

std::string element_label(const pt::ptree& el) {
    if (auto l = find_label_element(el)) return *l;
    if (auto t = first_text(el)) return *t;
    return {};
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

State parse_node_label(const std::string& text) {
    auto lines = lines_of(text);
    State s;
    const std::string& head = lines.at(0);
    bool ok = head.size() > 2 && head.rfind("v_", 0) == 0;
    for (char c : head) ok = ok && is_ident_char(c);
    if (!ok) throw LabelGrammarError(text, "node label '" + head + "' is not of the form v_Name");
    s.label = head;
    s.assertion = head;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& m = lines[i];
        if (m == "START") {
            s.isStart = true;
        } else if (m == "EXIT") {
            s.isExit = true;
        } else if (m.rfind("SUBMODEL", 0) == 0 && m.size() > 8 && std::isspace(static_cast<unsigned char>(m[8]))) {
            std::string ref = trim(m.substr(8));
            if (ref.empty()) throw LabelGrammarError(text, "SUBMODEL marker without a model name");
            s.submodel = ref;
        } else {
            throw LabelGrammarError(text, "unknown marker line '" + m + "' in node label");
        }
    }
    return s;
}

// Finds the ']' closing a guard, skipping quoted string contents.
std::size_t find_guard_end(const std::string& s, std::size_t from) {
    bool in_str = false;
    for (std::size_t i = from; i < s.size(); ++i) {
        char c = s[i];
        if (in_str) {
            if (c == '\\') ++i;
            else if (c == '\'') in_str = false;
        } else if (c == '\'') {
            in_str = true;
        } else if (c == ']') {
            return i;
        }
    }
    return std::string::npos;
}

void parse_edge_label(const std::string& raw, Transition& t) {
    std::string text = trim(raw);
    std::size_t i = 0;
    while (i < text.size() && is_ident_char(text[i])) ++i;
    std::string name = text.substr(0, i);
    if (name.size() <= 2 || name.rfind("e_", 0) != 0)
        throw LabelGrammarError(raw, "edge label '" + raw + "' does not start with e_Name");
    t.label = name;
    std::string rest = trim(std::string_view(text).substr(i));
    try {
        if (!rest.empty() && rest[0] == '[') {
            std::size_t close = find_guard_end(rest, 1);
            if (close == std::string::npos) throw LabelGrammarError(raw, "unterminated guard in '" + raw + "'");
            t.guard = parse_expr(rest.substr(1, close - 1));
            rest = trim(std::string_view(rest).substr(close + 1));
        }
        if (!rest.empty()) {
            if (rest[0] != '/') throw LabelGrammarError(raw, "expected '/' before actions in '" + raw + "'");
            t.actions = parse_actions(rest.substr(1));
        }
    } catch (const SyntaxError& e) {
        throw LabelGrammarError(raw, "in edge label '" + raw + "': " + e.what());
    }
}

}  // namespace

EfsmModel parse_graphml(std::string_view bytes) {
    pt::ptree doc;
    try {
        std::istringstream in{std::string(bytes)};
        pt::read_xml(in, doc, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("line " + std::to_string(e.line()), std::string("malformed XML: ") + e.what());
    }
    auto root = doc.get_child_optional("graphml");
    if (!root) throw ParseError("graphml", "missing <graphml> root element");

    std::map<std::string, std::string> key_names;  // key id -> attr.name
    for (const auto& [name, el] : *root)
        if (name == "key") key_names[attr(el, "id")] = attr(el, "attr.name");

    auto graph = root->get_child_optional("graph");
    if (!graph) throw ParseError("graphml", "missing <graph> element");

    std::string model_name = attr(*graph, "id");
    VarDecls vars;
    std::map<std::string, std::string> node_labels;  // node id -> state label
    std::vector<State> states;
    std::vector<Transition> trans;

    for (const auto& [name, el] : *graph) {
        if (name != "data") continue;
        std::string key = attr(el, "key");
        std::string kname = key_names.count(key) ? key_names[key] : key;
        if (kname == "variables") {
            try {
                vars = parse_var_decls(el.data());
            } catch (const DslSyntaxError& e) {
                throw ParseError("graph data '" + key + "'", std::string("bad variable block: ") + e.what());
            }
        } else if (kname == "name") {
            model_name = trim(el.data());
        }
    }
    if (model_name.empty()) throw ParseError("graph", "graph has no id");

    for (const auto& [name, el] : *graph) {
        if (name != "node") continue;
        std::string id = attr(el, "id");
        if (id.empty()) throw ParseError("node", "node without id");
        std::string text = element_label(el);
        if (text.empty()) continue;
        State s = parse_node_label(text);
        node_labels[id] = s.label;
        states.push_back(std::move(s));
    }
    for (const auto& [name, el] : *graph) {
        if (name != "edge") continue;
        std::string id = attr(el, "id");
        std::string src = attr(el, "source"), dst = attr(el, "target");
        if (!node_labels.count(src)) throw ParseError(id, "edge '" + id + "' leaves unlabeled or unknown node '" + src + "'");
        if (!node_labels.count(dst)) throw ParseError(id, "edge '" + id + "' enters unlabeled or unknown node '" + dst + "'");
        std::string text = element_label(el);
        if (text.empty()) throw LabelGrammarError("", "edge '" + id + "' has no label");
        Transition t;
        parse_edge_label(text, t);
        t.source = node_labels[src];
        t.target = node_labels[dst];
        trans.push_back(std::move(t));
    }
    try {
        return EfsmModel(model_name, std::move(states), std::move(trans), std::move(vars));
    } catch (const ModelError& e) {
        throw ParseError("graph", e.what());
    }
}

}  // namespace mbt
