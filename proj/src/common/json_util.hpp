#pragma once

// Checked accessors over nlohmann::json that raise ParseError with a path.

#include "roekit/common.hpp"

#include <json.hpp>

#include <complex>
#include <string>

namespace roekit::jsonu {

using nlohmann::json;

inline std::string at(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}
inline std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(at(path, key), "missing field");
    return *it;
}

inline const json* optional_field(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    return j.get<double>();
}

inline std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

inline const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array");
    return j;
}

inline std::complex<double> complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected a [re, im] pair");
    return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
}

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

inline Vector vector(const json& j, const std::string& path) {
    array(j, path);
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], at(path, i));
    return v;
}

inline json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Matrix matrix(const json& j, const std::string& path, Eigen::Index cols_if_empty = 0) {
    array(j, path);
    if (j.empty()) return Matrix(0, cols_if_empty);
    const std::size_t cols = array(j[0], at(path, 0)).size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = at(path, r);
        if (array(j[r], rp).size() != cols) throw ParseError(rp, "ragged matrix row");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], at(rp, c));
    }
    return m;
}

inline json matrix_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
    return a;
}

inline json parse_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", what + " is not valid JSON: " + e.what());
    }
}

}  // namespace roekit::jsonu
