#include "lmival/models/model_io.hpp"

#include <fstream>

#include "lmival/polyalg/serialize.hpp"

namespace lmival::models {

using nlohmann::json;
using polyalg::polynomial_from_json;
using polyalg::polynomial_to_json;

namespace {

json set_to_json(SemialgebraicSet const& s)
{
    json j{{"inequalities", json::array()}, {"equalities", json::array()}};
    for (auto const& g : s.inequalities)
        j["inequalities"].push_back(polynomial_to_json(g));
    for (auto const& h : s.equalities)
        j["equalities"].push_back(polynomial_to_json(h));
    return j;
}

json endpoint_to_json(EndpointSpec const& e)
{
    if (auto const* d = std::get_if<DiracPoint>(&e))
        return {{"kind", "point"}, {"point", d->point}};
    return {{"kind", "set"}, {"set", set_to_json(std::get<FreeOnSet>(e).set)}};
}

// Cursor into the document that remembers how it got there.
struct Node {
    json const& j;
    std::string path;

    Node at(std::string const& key) const
    {
        if (!j.is_object())
            throw ModelFormatError(path, "expected an object");
        auto it = j.find(key);
        if (it == j.end())
            throw ModelFormatError(join(key), "missing field");
        return {*it, join(key)};
    }
    bool has(std::string const& key) const { return j.is_object() && j.contains(key); }
    Node operator[](std::size_t i) const { return {j[i], path + "[" + std::to_string(i) + "]"}; }
    std::string join(std::string const& key) const { return path.empty() ? key : path + "." + key; }

    std::size_t array_size() const
    {
        if (!j.is_array())
            throw ModelFormatError(path, "expected an array");
        return j.size();
    }
    std::string str() const
    {
        if (!j.is_string())
            throw ModelFormatError(path, "expected a string");
        return j.get<std::string>();
    }
    double number() const
    {
        if (!j.is_number())
            throw ModelFormatError(path, "expected a number");
        return j.get<double>();
    }
    std::vector<std::string> strings() const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < array_size(); ++i)
            out.push_back((*this)[i].str());
        return out;
    }
    Polynomial poly(VarSpace const& space) const
    {
        try {
            return polynomial_from_json(j, space);
        } catch (std::invalid_argument const& e) {
            throw ModelFormatError(path, e.what());
        }
    }
};

std::vector<Polynomial> poly_list(Node const& n, VarSpace const& space)
{
    std::vector<Polynomial> out;
    for (std::size_t i = 0; i < n.array_size(); ++i)
        out.push_back(n[i].poly(space));
    return out;
}

SemialgebraicSet set_from(Node const& n, VarSpace const& space)
{
    SemialgebraicSet s;
    if (n.has("inequalities"))
        s.inequalities = poly_list(n.at("inequalities"), space);
    if (n.has("equalities"))
        s.equalities = poly_list(n.at("equalities"), space);
    return s;
}

EndpointSpec endpoint_from(Node const& n, VarSpace const& space)
{
    auto const kind = n.at("kind").str();
    if (kind == "set")
        return FreeOnSet{set_from(n.at("set"), space)};
    if (kind == "point") {
        auto p = n.at("point");
        std::vector<double> pt;
        for (std::size_t i = 0; i < p.array_size(); ++i)
            pt.push_back(p[i].number());
        if (pt.size() != space.size())
            throw ModelFormatError(p.path, "point has " + std::to_string(pt.size())
                                               + " entries, model has "
                                               + std::to_string(space.size()) + " variables");
        return DiracPoint{std::move(pt)};
    }
    throw ModelFormatError(n.join("kind"), "expected \"set\" or \"point\", got \"" + kind + "\"");
}

}  // namespace

json save_model(PiecewiseModel const& m)
{
    json j;
    j["format"] = model_format_tag;
    j["name"] = m.name;
    auto const& names = m.space.names();
    j["states"] = std::vector<std::string>(names.begin(), names.begin() + m.num_states);
    j["parameters"] = std::vector<std::string>(names.begin() + m.num_states,
                                               names.begin() + m.num_states + m.num_parameters);
    if (m.has_time)
        j["time_variable"] = names.back();
    j["horizon"] = m.horizon;
    j["sense"] = to_string(m.sense);
    j["test_degree_per_order"] = m.test_degree_per_order;
    j["cells"] = json::array();
    for (auto const& c : m.cells) {
        json cj{{"name", c.name}, {"support", set_to_json(c.support)}, {"field", json::array()}};
        for (auto const& f : c.field)
            cj["field"].push_back(polynomial_to_json(f));
        j["cells"].push_back(std::move(cj));
    }
    j["ball"] = set_to_json(m.ball);
    j["initial"] = endpoint_to_json(m.initial);
    j["terminal"] = endpoint_to_json(m.terminal);
    j["running_cost"] = polynomial_to_json(m.running_cost);
    j["terminal_cost"] = polynomial_to_json(m.terminal_cost);
    j["angle_variables"] = m.angle_variables;
    j["constants"] = m.constants;
    if (!m.variable_scales.empty())
        j["variable_scales"] = m.variable_scales;
    return j;
}

PiecewiseModel load_model(json const& doc)
{
    Node root{doc, ""};
    if (!doc.is_object())
        throw ModelFormatError("$", "model document must be an object");
    if (root.has("format") && root.at("format").str() != model_format_tag)
        throw ModelFormatError("format", "unsupported format '" + root.at("format").str() + "'");

    PiecewiseModel m;
    m.name = root.has("name") ? root.at("name").str() : "unnamed";
    auto vars = root.at("states").strings();
    m.num_states = vars.size();
    if (root.has("parameters")) {
        auto ps = root.at("parameters").strings();
        m.num_parameters = ps.size();
        vars.insert(vars.end(), ps.begin(), ps.end());
    }
    if (root.has("time_variable")) {
        vars.push_back(root.at("time_variable").str());
        m.has_time = true;
    }
    try {
        m.space = VarSpace(vars);
    } catch (std::invalid_argument const& e) {
        throw ModelFormatError("states", e.what());
    }

    m.horizon = root.has("horizon") ? root.at("horizon").number() : 1.0;
    if (root.has("sense")) {
        auto s = root.at("sense").str();
        if (s == "max")
            m.sense = Sense::maximize;
        else if (s == "min")
            m.sense = Sense::minimize;
        else
            throw ModelFormatError("sense", "expected \"min\" or \"max\"");
    }
    if (root.has("test_degree_per_order")) {
        auto n = root.at("test_degree_per_order");
        if (!n.j.is_number_unsigned())
            throw ModelFormatError(n.path, "expected 1 or 2");
        m.test_degree_per_order = n.j.get<unsigned>();
    }

    auto cells = root.at("cells");
    for (std::size_t k = 0; k < cells.array_size(); ++k) {
        auto cn = cells[k];
        Cell c;
        c.name = cn.has("name") ? cn.at("name").str() : "cell" + std::to_string(k + 1);
        if (cn.has("support"))
            c.support = set_from(cn.at("support"), m.space);
        auto field = cn.at("field");
        c.field = poly_list(field, m.space);
        if (c.field.size() != m.num_states)
            throw ModelFormatError(field.path, "cell '" + c.name + "' has "
                                                   + std::to_string(c.field.size())
                                                   + " field components, expected "
                                                   + std::to_string(m.num_states));
        m.cells.push_back(std::move(c));
    }
    if (m.cells.empty())
        throw ModelFormatError("cells", "at least one cell is required");

    if (root.has("ball"))
        m.ball = set_from(root.at("ball"), m.space);
    m.initial = endpoint_from(root.at("initial"), m.space);
    m.terminal = endpoint_from(root.at("terminal"), m.space);
    m.running_cost = root.has("running_cost") ? root.at("running_cost").poly(m.space)
                                              : Polynomial(m.space);
    m.terminal_cost = root.has("terminal_cost") ? root.at("terminal_cost").poly(m.space)
                                                : Polynomial(m.space);
    if (root.has("angle_variables"))
        m.angle_variables = root.at("angle_variables").strings();
    if (root.has("constants")) {
        auto cn = root.at("constants");
        if (!cn.j.is_object())
            throw ModelFormatError(cn.path, "expected an object");
        for (auto const& [k, v] : cn.j.items())
            m.constants[k] = Node{v, cn.join(k)}.number();
    }
    if (root.has("variable_scales")) {
        auto vs = root.at("variable_scales");
        if (!vs.j.is_object())
            throw ModelFormatError(vs.path, "expected an object");
        for (auto const& [k, v] : vs.j.items())
            m.variable_scales[k] = Node{v, vs.join(k)}.number();
    }

    try {
        m.validate();
    } catch (std::invalid_argument const& e) {
        throw ModelFormatError("$", e.what());
    }
    return m;
}

PiecewiseModel load_model_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open model file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (json::parse_error const& e) {
        throw ModelFormatError("$", std::string("invalid JSON: ") + e.what());
    }
    return load_model(doc);
}

void save_model_file(PiecewiseModel const& m, std::filesystem::path const& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write model file " + path.string());
    out << save_model(m).dump(2) << '\n';
}

}  // namespace lmival::models
