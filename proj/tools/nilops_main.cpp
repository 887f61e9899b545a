// nilops: exact mod-2 Steenrod algebra and unstable-module computations.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "nilops/laws.hpp"
#include "nilops/nilfilt.hpp"
#include "nilops/parser.hpp"
#include "nilops/steenrod.hpp"
#include "nilops/tor.hpp"

using json = nlohmann::ordered_json;
using namespace nilops;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitComputation = 2;
constexpr int kExitRefutation = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

modules::FiniteUnstableModule load_module_file(const std::string& path) {
    auto doc = parser::load_document(read_file(path));
    if (auto* m = std::get_if<modules::FiniteUnstableModule>(&doc))
        return std::move(*m);
    return std::get<modules::FiniteUnstableAlgebra>(doc).module();
}

modules::FiniteUnstableAlgebra load_algebra_file(const std::string& path) {
    auto doc = parser::load_document(read_file(path));
    if (auto* a = std::get_if<modules::FiniteUnstableAlgebra>(&doc))
        return std::move(*a);
    throw validation_error("document has no products: " + path +
                           " describes a module, not an algebra");
}

// element specs look like "3:101" (degree, then one bit per basis element)
modules::Element parse_element(const std::string& spec, const modules::FiniteUnstableModule& m) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw validation_error("element spec must look like '<degree>:<bits>'");
    int degree = 0;
    try {
        degree = std::stoi(spec.substr(0, colon));
    } catch (...) {
        throw validation_error("element spec degree is not a number: " + spec);
    }
    const std::string bits = spec.substr(colon + 1);
    if (degree < 0 || degree > m.top_degree())
        throw validation_error("element degree out of range");
    if (bits.size() != m.dim(degree))
        throw validation_error("element spec has " + std::to_string(bits.size()) +
                               " bits; degree " + std::to_string(degree) + " has dimension " +
                               std::to_string(m.dim(degree)));
    gf2::BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw validation_error("element bits are 0 or 1");
        if (bits[i] == '1')
            v.set(i, true);
    }
    return modules::Element::at(degree, v);
}

json element_to_json(const modules::Element& e) {
    json out = json::array();
    for (const auto& [deg, v] : e.components) {
        if (v.is_zero())
            continue;
        json c;
        c["degree"] = deg;
        c["bits"] = v.to_string();
        out.push_back(std::move(c));
    }
    return out;
}

std::string element_to_text(const modules::Element& e, const modules::FiniteUnstableModule& m) {
    if (e.is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [deg, v] : e.components) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v.get(i))
                continue;
            if (!first)
                os << " + ";
            os << m.space().label(deg, i);
            first = false;
        }
    }
    return os.str();
}

struct Options {
    std::string format = "text";
    bool json() const { return format == "json"; }
};

void emit(const Options& opt, const json& as_json, const std::string& as_text) {
    if (opt.json())
        std::cout << as_json.dump(2) << "\n";
    else
        std::cout << as_text;
}

int cmd_expression(const Options& opt, const std::string& verb, const std::string& lhs,
                   const std::string& rhs) {
    steenrod::AdmissibleSum result;
    if (verb == "normalize")
        result = steenrod::adem_normalize(parser::parse_op(lhs));
    else if (verb == "conjugate")
        result = steenrod::conjugate(steenrod::adem_normalize(parser::parse_op(lhs)));
    else
        result = steenrod::multiply(steenrod::adem_normalize(parser::parse_op(lhs)),
                                    steenrod::adem_normalize(parser::parse_op(rhs)));
    json j;
    j["input"] = rhs.empty() ? lhs : lhs + " * " + rhs;
    j["result"] = parser::print_sum(result);
    emit(opt, j, parser::print_sum(result) + "\n");
    return 0;
}

int cmd_basis(const Options& opt, int degree, int subalgebra) {
    json j;
    j["degree"] = degree;
    std::ostringstream text;
    if (subalgebra < 0) {
        const auto basis = steenrod::full_basis(degree);
        json arr = json::array();
        for (const auto& m : basis) {
            arr.push_back(m.to_string());
            text << m.to_string() << "\n";
        }
        j["basis"] = std::move(arr);
    } else {
        const auto sub = steenrod::subalgebra_basis(subalgebra, degree);
        j["subalgebra"] = subalgebra;
        json arr = json::array();
        for (const auto& e : sub.by_degree[static_cast<std::size_t>(degree)]) {
            arr.push_back(e.to_string());
            text << e.to_string() << "\n";
        }
        j["basis"] = std::move(arr);
    }
    emit(opt, j, text.str());
    return 0;
}

int cmd_act(const Options& opt, const std::string& module_path, const std::string& op,
            const std::string& element_spec) {
    const auto m = load_module_file(module_path);
    const auto sm = modules::StructuredModule::finite(m);
    const auto x = parse_element(element_spec, m);
    const auto sum = steenrod::adem_normalize(parser::parse_op(op));
    const auto y = modules::act(sm, sum, x);
    json j;
    j["module"] = m.name();
    j["op"] = parser::print_sum(sum);
    j["element"] = element_to_json(x);
    j["result"] = element_to_json(y);
    emit(opt, j, element_to_text(y, m) + "\n");
    return 0;
}

int cmd_membership(const Options& opt, int n, const std::string& target_text) {
    const auto target = steenrod::adem_normalize(parser::parse_op(target_text));
    const auto w = steenrod::ideal_membership(target, n);
    json j;
    j["n"] = n;
    j["target"] = parser::print_sum(target);
    j["member"] = w.has_value();
    std::ostringstream text;
    if (w) {
        json pairs = json::array();
        for (const auto& [a, b] : w->pairs) {
            pairs.push_back(json::array({a.to_string(), b.to_string()}));
            text << "(" << a.to_string() << ", " << b.to_string() << ")\n";
        }
        j["witness"] = std::move(pairs);
        if (w->pairs.empty())
            text << "member (empty witness)\n";
    } else {
        text << "not a member\n";
    }
    emit(opt, j, text.str());
    return 0;
}

int cmd_filtration(const Options& opt, const std::string& module_path, int s_max, int d_max,
                   int c_max) {
    const auto m = load_module_file(module_path);
    const int bound = d_max >= 0 ? d_max : m.top_degree();
    const auto table = nilfilt::filtration_table(modules::StructuredModule::finite(m),
                                                 s_max, bound, c_max);
    json j;
    j["module"] = m.name();
    j["budgets"] = {{"s_max", s_max}, {"degree_bound", bound}, {"c_max", c_max}};
    json layers = json::array();
    std::ostringstream text;
    text << "module " << m.name() << " (s_max=" << s_max << ", degree_bound=" << bound
         << ", c_max=" << c_max << ")\n";
    for (int s = 0; s <= s_max; ++s) {
        json layer;
        layer["s"] = s;
        json dims = json::object();
        text << "M_" << s << " dims:";
        for (int d = 0; d <= bound; ++d) {
            const auto n = table.layers[static_cast<std::size_t>(s)].dim(d);
            dims[std::to_string(d)] = n;
            text << " " << n;
        }
        text << "\n";
        layer["dims"] = std::move(dims);
        json rs = json::object();
        text << "R_" << s << " dims:";
        int printed = 0;
        for (const auto& [d, n] : table.rs_dims[static_cast<std::size_t>(s)]) {
            rs[std::to_string(d)] = n;
            text << " " << d << ":" << n;
            ++printed;
        }
        if (!printed)
            text << " (zero)";
        text << "\n";
        layer["rs_dims"] = std::move(rs);
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    json certs = json::array();
    text << "certificates:\n";
    for (const auto& [key, cert] : table.certificates) {
        json c;
        c["degree"] = key.first;
        c["index"] = key.second;
        c["verdict"] = cert.to_string();
        certs.push_back(std::move(c));
        text << "  " << m.space().label(key.first, key.second) << ": " << cert.to_string()
             << "\n";
    }
    j["certificates"] = std::move(certs);
    emit(opt, j, text.str());
    return 0;
}

int cmd_tor(const Options& opt, const std::string& algebra_path, int s_max, int t_max,
            int c_max) {
    const auto a = load_algebra_file(algebra_path);
    const auto page = tor::bar_tor(a, s_max, t_max);

    // nilpotence lower bound of the augmentation ideal, computed honestly
    int dbar = 0;
    const auto sm = modules::StructuredModule::finite(a.module());
    for (int s = 1; s <= a.module().top_degree() + 1; ++s) {
        const auto layer = nilfilt::filtration_layer(sm, s, a.module().top_degree(), c_max);
        bool full = true;
        for (int d = 1; d <= a.module().top_degree(); ++d)
            full = full && layer.dim(d) == a.module().dim(d);
        if (!full)
            break;
        dbar = s;
    }

    json j;
    j["algebra"] = a.module().name();
    j["s_max"] = s_max;
    j["t_max"] = t_max;
    j["augmentation_ideal_nilpotence"] = dbar;
    j["suspension_convention"] = page.suspension_convention;
    j["differential_shape"] = page.differential_shape;
    std::ostringstream text;
    text << "Tor over " << a.module().name() << " (s<=" << s_max << ", t<=" << t_max << ")\n";
    json entries = json::object();
    for (int s = 0; s <= s_max; ++s) {
        const auto certs = s >= 1 ? tor::column_nilpotence(page, s, dbar, c_max)
                                  : std::map<std::pair<int, std::size_t>,
                                             nilfilt::NilpotenceCertificate>{};
        for (int t = 0; t <= t_max; ++t) {
            const auto* e = page.entry(s, t);
            if (!e)
                continue;
            json je;
            je["dim"] = e->dim;
            je["representatives"] = e->rep_labels;
            json action = json::object();
            for (const auto& [i, mat] : e->action) {
                if (mat.is_zero())
                    continue;
                json rows = json::array();
                for (std::size_t r = 0; r < mat.rows(); ++r) {
                    std::string row;
                    for (std::size_t c = 0; c < mat.cols(); ++c)
                        row += mat.get(r, c) ? '1' : '0';
                    rows.push_back(row);
                }
                action["Sq" + std::to_string(i)] = std::move(rows);
            }
            je["action"] = std::move(action);
            je["action_complete"] = e->action_complete;
            if (s >= 1) {
                json anns = json::array();
                for (std::size_t idx = 0; idx < e->dim; ++idx)
                    anns.push_back(certs.at({t, idx}).to_string());
                je["nilpotence"] = std::move(anns);
            }
            entries["(-" + std::to_string(s) + "," + std::to_string(t) + ")"] = std::move(je);
            text << "  (-" << s << "," << t << ") dim " << e->dim;
            for (const auto& label : e->rep_labels)
                text << " " << label;
            text << "\n";
        }
    }
    j["entries"] = std::move(entries);
    emit(opt, j, text.str());
    return 0;
}

int cmd_laws(const Options& opt, const std::vector<std::string>& only, std::uint64_t seed) {
    const auto reports = laws::run_suite(only, seed);
    if (opt.json())
        std::cout << laws::reports_to_json(reports);
    else
        std::cout << laws::reports_to_text(reports);
    return laws::suite_ok(reports) ? 0 : kExitRefutation;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("NILOPS_THREADS")) {
        const int n = std::atoi(threads);
        if (n >= 1)
            omp_set_num_threads(n);
    }

    CLI::App app{"exact mod-2 Steenrod algebra and unstable module computations"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    std::string lhs, rhs, module_path, algebra_path, op_text, element_spec, target_text;
    int degree = 0, subalgebra = -1, n_param = 1;
    int s_max = 4, t_max = 12, d_max = -1, c_max = 16;
    std::vector<std::string> only;
    std::uint64_t seed = 0;

    auto* normalize = app.add_subcommand("normalize", "rewrite into canonical admissible form");
    normalize->add_option("expr", lhs, "operation expression")->required();

    auto* conjugate = app.add_subcommand("conjugate", "apply the antipode");
    conjugate->add_option("expr", lhs, "operation expression")->required();

    auto* multiply = app.add_subcommand("multiply", "product of two expressions");
    multiply->add_option("lhs", lhs, "left factor")->required();
    multiply->add_option("rhs", rhs, "right factor")->required();

    auto* basis = app.add_subcommand("basis", "admissible basis of one degree");
    basis->add_option("--degree", degree, "internal degree")->required();
    basis->add_option("--subalgebra", subalgebra, "restrict to A(n)");

    auto* act = app.add_subcommand("act", "act on a module element");
    act->add_option("--module", module_path, "module description file")->required();
    act->add_option("--op", op_text, "operation expression")->required();
    act->add_option("--element", element_spec, "element as <degree>:<bits>")->required();

    auto* filtration = app.add_subcommand("filtration", "nilpotent filtration report");
    filtration->add_option("--module", module_path, "module description file")->required();
    filtration->add_option("--smax", s_max, "largest layer index")->required();
    filtration->add_option("--dmax", d_max, "degree bound (default: the module top)");
    filtration->add_option("--cmax", c_max, "chain iteration budget")->capture_default_str();

    auto* torcmd = app.add_subcommand("tor", "bar-complex Tor page with its action");
    torcmd->add_option("--algebra", algebra_path, "algebra description file")->required();
    torcmd->add_option("--smax", s_max, "homological bound")->required();
    torcmd->add_option("--tmax", t_max, "internal degree bound")->required();
    torcmd->add_option("--cmax", c_max, "chain iteration budget")->capture_default_str();

    auto* membership = app.add_subcommand("membership", "two-sided span membership");
    membership->add_option("--n", n_param, "the level n")->required();
    membership->add_option("--target", target_text, "target expression")->required();

    auto* lawscmd = app.add_subcommand("laws", "run the verification law suite");
    lawscmd->add_option("--only", only, "law id filter (repeatable)");
    lawscmd->add_option("--seed", seed, "suite seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        if (normalize->parsed())
            return cmd_expression(opt, "normalize", lhs, "");
        if (conjugate->parsed())
            return cmd_expression(opt, "conjugate", lhs, "");
        if (multiply->parsed())
            return cmd_expression(opt, "multiply", lhs, rhs);
        if (basis->parsed())
            return cmd_basis(opt, degree, subalgebra);
        if (act->parsed())
            return cmd_act(opt, module_path, op_text, element_spec);
        if (filtration->parsed())
            return cmd_filtration(opt, module_path, s_max, d_max, c_max);
        if (torcmd->parsed())
            return cmd_tor(opt, algebra_path, s_max, t_max, c_max);
        if (membership->parsed())
            return cmd_membership(opt, n_param, target_text);
        if (lawscmd->parsed())
            return cmd_laws(opt, only, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitUsage;
}
