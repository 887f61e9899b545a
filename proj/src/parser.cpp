#include "nilops/parser.hpp"

#include <json.hpp>

namespace nilops::parser {

using json = nlohmann::ordered_json;
using gf2::BitMatrix;
using gf2::BitVec;
using modules::FiniteUnstableAlgebra;
using modules::FiniteUnstableModule;

std::string ParseError::message() const {
    return "parse error at byte " + std::to_string(position) + ": expected " + expected +
           ", found " + (found.empty() ? "end of input" : "'" + found + "'");
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
                                     text[pos] == '\r'))
            ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() const { return text[pos]; }

    [[noreturn]] void fail(const std::string& expected) const {
        std::size_t end = pos;
        while (end < text.size() && end < pos + 12 && !std::isspace(static_cast<unsigned char>(text[end])))
            ++end;
        throw ParseException({pos, expected, text.substr(pos, end - pos)});
    }
};

// sqop := "Sq" integer, or the literal "1"
steenrod::Monomial parse_term(Cursor& c) {
    c.skip_ws();
    if (c.pos < c.text.size() && c.peek() == '1') {
        const std::size_t at = c.pos;
        ++c.pos;
        if (c.pos < c.text.size() && !std::isspace(static_cast<unsigned char>(c.peek())) &&
            c.peek() != '+') {
            c.pos = at;
            c.fail("'1' or 'Sq<k>'");
        }
        return steenrod::Monomial();
    }
    std::vector<int> indices;
    while (true) {
        c.skip_ws();
        if (c.pos >= c.text.size() || c.peek() == '+')
            break;
        if (c.text.compare(c.pos, 2, "Sq") != 0)
            c.fail(indices.empty() ? "'1' or 'Sq<k>'" : "'Sq<k>', '+' or end of input");
        const std::size_t sq_at = c.pos;
        c.pos += 2;
        if (c.pos >= c.text.size() || !std::isdigit(static_cast<unsigned char>(c.peek()))) {
            c.pos = sq_at;
            c.fail("a decimal index after 'Sq'");
        }
        long value = 0;
        bool overflow = false;
        while (c.pos < c.text.size() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
            value = value * 10 + (c.peek() - '0');
            if (value > 1'000'000)
                overflow = true;
            ++c.pos;
        }
        if (overflow) {
            c.pos = sq_at;
            c.fail("an operation index below 10^6");
        }
        if (value < 1) {
            c.pos = sq_at;
            c.fail("an operation index >= 1 (the unit is written '1')");
        }
        indices.push_back(static_cast<int>(value));
    }
    if (indices.empty())
        c.fail("'1' or 'Sq<k>'");
    return steenrod::Monomial(std::move(indices));
}

}  // namespace

steenrod::Expression parse_op(const std::string& text) {
    Cursor c{text};
    steenrod::Expression out;
    out.terms.push_back(parse_term(c));
    while (!c.done()) {
        if (c.peek() != '+')
            c.fail("'+' or end of input");
        ++c.pos;
        out.terms.push_back(parse_term(c));
    }
    return out;
}

std::string print_sum(const steenrod::AdmissibleSum& sum) {
    return sum.to_string();
}

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw validation_error("document field '" + path + "': " + what);
}

BitMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                           const std::string& path) {
    if (!j.is_array())
        schema_fail(path, "expected an array of rows");
    if (j.size() != rows)
        schema_fail(path, "expected " + std::to_string(rows) + " rows, got " +
                              std::to_string(j.size()));
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.size() != cols)
            schema_fail(path + "[" + std::to_string(r) + "]",
                        "expected a row of " + std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& v = row[c];
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
                schema_fail(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                            "matrix entries are 0 or 1");
            if (v.get<int>())
                m.set(r, c, true);
        }
    }
    return m;
}

json matrix_to_json(const BitMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
            row.push_back(m.get(r, c) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    return rows;
}

FiniteUnstableModule::Description module_description_from_json(const json& doc) {
    FiniteUnstableModule::Description d;
    if (!doc.is_object())
        schema_fail("", "expected a JSON object");
    if (doc.contains("name")) {
        if (!doc["name"].is_string())
            schema_fail("name", "expected a string");
        d.name = doc["name"].get<std::string>();
    }
    if (!doc.contains("top_degree") || !doc["top_degree"].is_number_integer())
        schema_fail("top_degree", "expected an integer");
    const int top = doc["top_degree"].get<int>();
    if (top < 0)
        schema_fail("top_degree", "expected a nonnegative integer");
    if (!doc.contains("dims") || !doc["dims"].is_array())
        schema_fail("dims", "expected an array");
    if (static_cast<int>(doc["dims"].size()) != top + 1)
        schema_fail("dims", "expected top_degree+1 entries");
    for (std::size_t i = 0; i < doc["dims"].size(); ++i) {
        const json& v = doc["dims"][i];
        if (!v.is_number_integer() || v.get<long long>() < 0)
            schema_fail("dims[" + std::to_string(i) + "]", "expected a nonnegative integer");
        d.dims.push_back(v.get<std::size_t>());
    }
    auto dim = [&](int deg) {
        return (deg < 0 || deg > top) ? std::size_t{0} : d.dims[static_cast<std::size_t>(deg)];
    };
    if (doc.contains("labels")) {
        if (!doc["labels"].is_object())
            schema_fail("labels", "expected an object of per-degree arrays");
        for (const auto& [key, arr] : doc["labels"].items()) {
            int deg = -1;
            try {
                deg = std::stoi(key);
            } catch (...) {
                schema_fail("labels." + key, "keys are degrees");
            }
            if (deg < 0 || deg > top)
                schema_fail("labels." + key, "degree out of range");
            if (!arr.is_array() || arr.size() != dim(deg))
                schema_fail("labels." + key, "expected one label per basis element");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                if (!arr[i].is_string())
                    schema_fail("labels." + key + "[" + std::to_string(i) + "]",
                                "expected a string");
                d.labels[{deg, i}] = arr[i].get<std::string>();
            }
        }
    }
    if (doc.contains("ops")) {
        if (!doc["ops"].is_object())
            schema_fail("ops", "expected an object keyed by 'Sq<i>'");
        for (const auto& [key, arr] : doc["ops"].items()) {
            if (key.size() < 3 || key.compare(0, 2, "Sq") != 0)
                schema_fail("ops." + key, "keys look like 'Sq<i>'");
            int i = 0;
            try {
                i = std::stoi(key.substr(2));
            } catch (...) {
                schema_fail("ops." + key, "keys look like 'Sq<i>'");
            }
            if (i < 1)
                schema_fail("ops." + key, "operation index must be >= 1");
            if (!arr.is_array() || static_cast<int>(arr.size()) != top + 1)
                schema_fail("ops." + key, "expected one entry per degree 0..top_degree");
            for (int deg = 0; deg <= top; ++deg) {
                const json& mat = arr[static_cast<std::size_t>(deg)];
                const std::string path = "ops." + key + "[" + std::to_string(deg) + "]";
                const bool expected = dim(deg) > 0 && deg + i <= top;
                if (!expected) {
                    if (!mat.is_array() || !mat.empty())
                        schema_fail(path, "no block can live at this degree; use []");
                    continue;
                }
                d.ops[i][deg] = matrix_from_json(mat, dim(deg + i), dim(deg), path);
            }
        }
    }
    return d;
}

FiniteUnstableAlgebra::Description algebra_description_from_json(const json& doc) {
    FiniteUnstableAlgebra::Description d;
    d.module = module_description_from_json(doc);
    const int top = static_cast<int>(d.module.dims.size()) - 1;
    auto dim = [&](int deg) {
        return (deg < 0 || deg > top) ? std::size_t{0} : d.module.dims[static_cast<std::size_t>(deg)];
    };
    const json& products = doc["products"];
    if (!products.is_object())
        schema_fail("products", "expected an object keyed by 'd1,d2'");
    for (const auto& [key, table] : products.items()) {
        const auto comma = key.find(',');
        if (comma == std::string::npos)
            schema_fail("products." + key, "keys look like 'd1,d2'");
        int d1 = -1, d2 = -1;
        try {
            d1 = std::stoi(key.substr(0, comma));
            d2 = std::stoi(key.substr(comma + 1));
        } catch (...) {
            schema_fail("products." + key, "keys look like 'd1,d2'");
        }
        if (d1 < 1 || d2 < 1 || d1 + d2 > top)
            schema_fail("products." + key, "degree pair out of range");
        const std::string path = "products." + key;
        if (!table.is_array() || table.size() != dim(d1))
            schema_fail(path, "expected one row per degree-" + std::to_string(d1) + " basis element");
        FiniteUnstableAlgebra::ProductTable t;
        for (std::size_t a = 0; a < table.size(); ++a) {
            const json& row = table[a];
            if (!row.is_array() || row.size() != dim(d2))
                schema_fail(path + "[" + std::to_string(a) + "]", "wrong column count");
            std::vector<BitVec> vals;
            for (std::size_t b = 0; b < row.size(); ++b) {
                const json& coeffs = row[b];
                const std::string vpath =
                    path + "[" + std::to_string(a) + "][" + std::to_string(b) + "]";
                if (!coeffs.is_array() || coeffs.size() != dim(d1 + d2))
                    schema_fail(vpath, "expected a coefficient array over the target degree");
                BitVec v(dim(d1 + d2));
                for (std::size_t i = 0; i < coeffs.size(); ++i) {
                    if (!coeffs[i].is_number_integer() ||
                        (coeffs[i].get<int>() != 0 && coeffs[i].get<int>() != 1))
                        schema_fail(vpath + "[" + std::to_string(i) + "]", "entries are 0 or 1");
                    if (coeffs[i].get<int>())
                        v.set(i, true);
                }
                vals.push_back(std::move(v));
            }
            t.push_back(std::move(vals));
        }
        d.products.emplace(std::make_pair(d1, d2), std::move(t));
    }
    return d;
}

json module_description_to_json(const FiniteUnstableModule::Description& d) {
    json doc = json::object();
    if (!d.name.empty())
        doc["name"] = d.name;
    const int top = static_cast<int>(d.dims.size()) - 1;
    doc["top_degree"] = top;
    doc["dims"] = d.dims;
    // labels: full per-degree arrays, defaults materialized, so that
    // save/load round-trips byte-exactly
    gf2::GradedVectorSpace space{d.dims};
    space.labels = d.labels;
    json labels = json::object();
    for (int deg = 0; deg <= top; ++deg) {
        if (space.dim(deg) == 0)
            continue;
        json arr = json::array();
        for (std::size_t i = 0; i < space.dim(deg); ++i)
            arr.push_back(space.label(deg, i));
        labels[std::to_string(deg)] = std::move(arr);
    }
    if (!labels.empty())
        doc["labels"] = std::move(labels);
    json ops = json::object();
    for (int i = 1; i <= top; ++i) {
        json per_degree = json::array();
        bool any = false;
        for (int deg = 0; deg <= top; ++deg) {
            const bool expected = space.dim(deg) > 0 && deg + i <= top;
            if (!expected) {
                per_degree.push_back(json::array());
                continue;
            }
            BitMatrix block(space.dim(deg + i), space.dim(deg));
            if (auto oit = d.ops.find(i); oit != d.ops.end())
                if (auto bit = oit->second.find(deg); bit != oit->second.end())
                    block = bit->second;
            per_degree.push_back(matrix_to_json(block));
            any = true;
        }
        if (any)
            ops["Sq" + std::to_string(i)] = std::move(per_degree);
    }
    doc["ops"] = std::move(ops);
    return doc;
}

}  // namespace

LoadedDocument load_document(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("document is not valid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("products"))
        return FiniteUnstableAlgebra::make(algebra_description_from_json(doc));
    return FiniteUnstableModule::make(module_description_from_json(doc));
}

std::string save_module(const FiniteUnstableModule& m) {
    return module_description_to_json(m.describe()).dump(2) + "\n";
}

std::string save_algebra(const FiniteUnstableAlgebra& a) {
    const auto d = a.describe();
    json doc = module_description_to_json(d.module);
    json products = json::object();
    const int top = static_cast<int>(d.module.dims.size()) - 1;
    for (int d1 = 1; d1 <= top; ++d1)
        for (int d2 = 1; d1 + d2 <= top; ++d2) {
            auto it = d.products.find({d1, d2});
            if (it == d.products.end())
                continue;
            json table = json::array();
            for (const auto& row : it->second) {
                json jrow = json::array();
                for (const auto& v : row) {
                    json coeffs = json::array();
                    for (std::size_t i = 0; i < v.size(); ++i)
                        coeffs.push_back(v.get(i) ? 1 : 0);
                    jrow.push_back(std::move(coeffs));
                }
                table.push_back(std::move(jrow));
            }
            products[std::to_string(d1) + "," + std::to_string(d2)] = std::move(table);
        }
    doc["products"] = std::move(products);
    return doc.dump(2) + "\n";
}

}  // namespace nilops::parser
