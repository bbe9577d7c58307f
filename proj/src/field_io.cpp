#include "pxeig/field_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pxeig/errors.hpp"

namespace pxeig {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DataError("csv: cannot parse number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

fs::path resolve(const fs::path& base, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() || base.empty() ? p : base / p;
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "." + key, "missing");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "not finite");
    return v;
}

int positive_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > 1'000'000)
        throw ConfigError(path, "expected a positive integer");
    return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

void write_field_csv(std::ostream& out, const ScalarField& f, const std::string& value_name) {
    const GriddedDomain& dom = f.domain();
    out << (dom.dim() == 1 ? "x," : "x,y,") << value_name << '\n';
    for (std::size_t k : dom.active_nodes()) {
        const Point x = dom.coord(k);
        out << format_double(x.x) << ',';
        if (dom.dim() == 2) out << format_double(x.y) << ',';
        out << format_double(f[k]) << '\n';
    }
}

void write_field_csv(const fs::path& path, const ScalarField& f, const std::string& value_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_field_csv(out, f, value_name);
}

ScalarField read_field_csv(std::istream& in, const DomainPtr& dom) {
    const std::size_t cols = dom->dim() + 1;
    std::string line;
    if (!std::getline(in, line)) throw DataError("csv: empty input");
    if (split(line, ',').size() != cols) throw DataError("csv: header has the wrong number of columns");
    ScalarField f(dom);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto parts = split(line, ',');
        if (parts.size() != cols) throw DataError("csv: row " + std::to_string(row) + " has the wrong number of columns");
        Point x{parse_double(parts[0]), dom->dim() == 2 ? parse_double(parts[1]) : 0.0};
        const std::size_t k = dom->nearest_node(x);
        if ((dom->coord(k) - x).norm() > 1e-6 * dom->h() || !dom->inside(k))
            throw DataError("csv: row " + std::to_string(row) + " is not an active grid node");
        f[k] = parse_double(parts[cols - 1]);
        if (!std::isfinite(f[k])) throw DataError("csv: row " + std::to_string(row) + " has a non-finite value");
    }
    return f;
}

ScalarField read_field_csv(const fs::path& path, const DomainPtr& dom) {
    std::ifstream in = open_in(path);
    return read_field_csv(in, dom);
}

std::vector<std::vector<std::uint8_t>> read_mask_pgm(const fs::path& path) {
    std::ifstream in = open_in(path);
    auto token = [&]() {
        std::string t;
        char c;
        while (in.get(c)) {
            if (c == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!t.empty()) break;
                continue;
            }
            t.push_back(c);
        }
        if (t.empty()) throw DataError("pgm: truncated header in " + path.string());
        return t;
    };
    const std::string magic = token();
    if (magic != "P2" && magic != "P5") throw DataError("pgm: unsupported format " + magic);
    const int w = std::stoi(token()), h = std::stoi(token()), maxval = std::stoi(token());
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) throw DataError("pgm: unsupported dimensions in " + path.string());
    std::vector<std::vector<std::uint8_t>> rows(h, std::vector<std::uint8_t>(w));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int v;
            if (magic == "P5") {
                const int ch = in.get();
                if (ch == EOF) throw DataError("pgm: truncated pixel data in " + path.string());
                v = ch;
            } else {
                v = std::stoi(token());
            }
            rows[r][c] = v > 0 ? 1 : 0;
        }
    }
    return rows;
}

std::vector<std::vector<std::uint8_t>> read_mask_csv(const fs::path& path) {
    std::ifstream in = open_in(path);
    std::vector<std::vector<std::uint8_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<std::uint8_t> row;
        for (auto cell : split(line, ',')) row.push_back(parse_double(cell) != 0.0 ? 1 : 0);
        rows.push_back(std::move(row));
    }
    return rows;
}

DomainPtr domain_from_json(const json& j, const fs::path& base_dir, const std::string& path) {
    const json& type = require(j, "kind", path);
    if (!type.is_string()) throw ConfigError(path + ".kind", "expected a string");
    const std::string t = type.get<std::string>();
    if (t != "interval" && t != "rectangle" && t != "mask") throw ConfigError(path + ".kind", "unknown domain type '" + t + "'");
    const std::vector<double> b = numbers(require(j, "bounds", path), path + ".bounds");
    try {
        if (t == "interval") {
            if (b.size() != 2) throw ConfigError(path + ".bounds", "interval needs [a, b]");
            return GriddedDomain::interval(b[0], b[1], positive_int(require(j, "resolution", path), path + ".resolution"));
        }
        if (b.size() != 4) throw ConfigError(path + ".bounds", t + " needs [x0, x1, y0, y1]");
        if (t == "rectangle") {
            return GriddedDomain::rectangle(b[0], b[1], b[2], b[3],
                                            positive_int(require(j, "resolution", path), path + ".resolution"));
        }
        if (t == "mask") {
            std::vector<std::vector<std::uint8_t>> rows;
            std::string where;
            if (j.contains("rows") || !j.contains("mask")) {
                where = path + ".rows";
                const json& r = require(j, "rows", path);
                if (!r.is_array()) throw ConfigError(where, "expected an array of strings");
                for (const auto& s : r) {
                    if (!s.is_string()) throw ConfigError(where, "expected an array of strings");
                    std::vector<std::uint8_t> row;
                    for (char c : s.get<std::string>()) {
                        if (c == '#' || c == '1') row.push_back(1);
                        else if (c == '.' || c == '0') row.push_back(0);
                        else throw ConfigError(where, std::string("unexpected character '") + c + "'");
                    }
                    rows.push_back(std::move(row));
                }
            } else {
                where = path + ".mask";
                const json& f = j.at("mask");
                if (!f.is_string()) throw ConfigError(where, "expected a file name");
                const fs::path file = resolve(base_dir, f.get<std::string>());
                try {
                    rows = file.extension() == ".pgm" ? read_mask_pgm(file) : read_mask_csv(file);
                } catch (const DataError& e) {
                    throw ConfigError(where, e.what());
                }
            }
            if (rows.size() < 3) throw ConfigError(where, "mask needs at least 3 rows");
            const std::size_t w = rows.front().size();
            for (const auto& r : rows) {
                if (r.size() != w) throw ConfigError(where, "mask rows differ in length");
            }
            const int nx = static_cast<int>(w) - 1, ny = static_cast<int>(rows.size()) - 1;
            std::vector<std::uint8_t> inside(w * rows.size());
            // first row is the top of the picture
            for (int iy = 0; iy <= ny; ++iy) {
                for (int ix = 0; ix <= nx; ++ix) inside[iy * w + ix] = rows[ny - iy][ix];
            }
            Box box = Box::rectangle(b[0], b[1], b[2], b[3]);
            return GriddedDomain::mask(box, nx, ny, std::move(inside));
        }
    } catch (const ArgumentError& e) {
        throw ConfigError(path, e.what());
    } catch (const DegenerateDomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".kind", "unknown domain type '" + t + "'");
}

VariableExponent exponent_from_json(const json& j, const Box& box, const fs::path& base_dir, const std::string& path) {
    const json& type = require(j, "kind", path);
    if (!type.is_string()) throw ConfigError(path + ".kind", "expected a string");
    const std::string t = type.get<std::string>();
    try {
        if (t == "constant") return VariableExponent::constant(number(require(j, "value", path), path + ".value"), box);
        if (t == "affine") {
            return VariableExponent::affine(numbers(require(j, "coeffs", path), path + ".coeffs"), box);
        }
        if (t == "sampled") {
            const json& src = require(j, "samples", path);
            const std::string where = path + ".samples";
            std::vector<double> samples;
            int nx = 0, ny = 0;
            if (src.is_array()) {
                samples = numbers(src, where);
                nx = positive_int(require(j, "nx", path), path + ".nx");
                ny = box.dim == 2 ? positive_int(require(j, "ny", path), path + ".ny") : 0;
            } else if (src.is_string()) {
                // CSV with coordinates then value, x fastest; the grid shape follows from distinct coordinates
                std::vector<double> xs, ys;
                try {
                    std::ifstream in = open_in(resolve(base_dir, src.get<std::string>()));
                    std::string line;
                    std::getline(in, line);
                    while (std::getline(in, line)) {
                        if (line.empty() || line == "\r") continue;
                        const auto parts = split(line, ',');
                        if (parts.size() != static_cast<std::size_t>(box.dim) + 1) throw DataError("wrong number of columns");
                        xs.push_back(parse_double(parts[0]));
                        if (box.dim == 2) ys.push_back(parse_double(parts[1]));
                        samples.push_back(parse_double(parts.back()));
                    }
                } catch (const DataError& e) {
                    throw ConfigError(where, e.what());
                }
                auto distinct = [](std::vector<double> v) {
                    std::sort(v.begin(), v.end());
                    return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
                };
                nx = j.contains("nx") ? positive_int(j.at("nx"), path + ".nx") : distinct(xs) - 1;
                ny = box.dim == 2 ? (j.contains("ny") ? positive_int(j.at("ny"), path + ".ny") : distinct(ys) - 1) : 0;
            } else {
                throw ConfigError(where, "expected an array of numbers or a CSV file name");
            }
            return VariableExponent::sampled(box, nx, ny, std::move(samples));
        }
    } catch (const ArgumentError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".kind", "unknown exponent type '" + t + "'");
}

}  // namespace pxeig
