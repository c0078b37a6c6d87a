#include "roekit/polyhedron.hpp"

#include "common/json_util.hpp"

#include <cmath>

namespace roekit {

using namespace jsonu;

bool Polyhedron::contains(const Vector& x, double tol) const {
    return rows() == 0 || slack(x).minCoeff() >= -tol;
}

Polyhedron Polyhedron::normalized() const {
    Polyhedron out = *this;
    const double top = rows() ? G.rowwise().norm().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < rows(); ++i) {
        double nrm = G.row(i).norm();
        if (nrm <= 1e-12 * top) {
            out.G.row(i).setZero();
        } else {
            out.G.row(i) /= nrm;
            out.g(i) /= nrm;
        }
    }
    return out;
}

Polyhedron Polyhedron::select(const std::vector<Eigen::Index>& keep) const {
    Polyhedron out;
    out.G.resize(static_cast<Eigen::Index>(keep.size()), dim());
    out.g.resize(static_cast<Eigen::Index>(keep.size()));
    out.var_names = var_names;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.G.row(static_cast<Eigen::Index>(k)) = G.row(keep[k]);
        out.g(static_cast<Eigen::Index>(k)) = g(keep[k]);
        if (!tags.empty()) out.tags.push_back(tags[static_cast<std::size_t>(keep[k])]);
    }
    return out;
}

Polyhedron Polyhedron::stacked(const Polyhedron& other) const {
    if (rows() > 0 && other.rows() > 0 && other.dim() != dim()) throw Error("cannot stack polyhedra of different dimension");
    Polyhedron out;
    const Eigen::Index n = rows() > 0 ? dim() : other.dim();
    out.G.resize(rows() + other.rows(), n);
    out.g.resize(rows() + other.rows());
    if (rows() > 0) out.G.topRows(rows()) = G;
    if (other.rows() > 0) out.G.bottomRows(other.rows()) = other.G;
    out.g << g, other.g;
    out.var_names = var_names.empty() ? other.var_names : var_names;
    if (!tags.empty() || !other.tags.empty()) {
        out.tags = tags;
        out.tags.resize(static_cast<std::size_t>(rows()));
        out.tags.insert(out.tags.end(), other.tags.begin(), other.tags.end());
        out.tags.resize(static_cast<std::size_t>(out.rows()));
    }
    return out;
}

void Polyhedron::check() const {
    if (G.rows() < 1) throw ParseError("G", "polyhedron needs at least one row");
    if (G.cols() < 1) throw ParseError("G", "polyhedron needs at least one variable");
    if (g.size() != G.rows()) throw ParseError("g", "length does not match the rows of G");
    if (!G.allFinite()) throw ParseError("G", "non-finite entry");
    if (!g.allFinite()) throw ParseError("g", "non-finite entry");
    if (!var_names.empty() && static_cast<Eigen::Index>(var_names.size()) != G.cols())
        throw ParseError("var_names", "length does not match the columns of G");
    if (!tags.empty() && static_cast<Eigen::Index>(tags.size()) != G.rows())
        throw ParseError("tags", "length does not match the rows of G");
}

std::string Polyhedron::to_json() const {
    json doc = {{"G", matrix_json(G)}, {"g", vector_json(g)}, {"var_names", var_names}};
    if (!tags.empty()) doc["tags"] = tags;
    return doc.dump(2) + "\n";
}

Polyhedron Polyhedron::from_json(const std::string& text) {
    const json doc = parse_text(text, "polyhedron document");
    Polyhedron p;
    p.G = matrix(field(doc, "G", ""), "G");
    p.g = vector(field(doc, "g", ""), "g");
    if (auto* v = optional_field(doc, "var_names")) {
        array(*v, "var_names");
        for (std::size_t i = 0; i < v->size(); ++i) p.var_names.push_back(string((*v)[i], at("var_names", i)));
    }
    if (auto* v = optional_field(doc, "tags")) {
        array(*v, "tags");
        for (std::size_t i = 0; i < v->size(); ++i) p.tags.push_back(string((*v)[i], at("tags", i)));
    }
    p.check();
    return p;
}

double Box::volume() const { return width().prod(); }

double Box::log_width_sum(double floor) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i) {
        double w = hi(i) - lo(i);
        if (w <= floor) continue;
        s += std::log(w);
    }
    return s;
}

bool Box::contains(const Box& inner, double tol) const {
    return ((inner.lo - lo).array() >= -tol).all() && ((hi - inner.hi).array() >= -tol).all();
}

Polyhedron Box::as_polyhedron() const {
    const Eigen::Index n = dim();
    Polyhedron p(Matrix::Zero(2 * n, n), Vector(2 * n));
    for (Eigen::Index k = 0; k < n; ++k) {
        p.G(2 * k, k) = 1.0;
        p.g(2 * k) = hi(k);
        p.G(2 * k + 1, k) = -1.0;
        p.g(2 * k + 1) = -lo(k);
    }
    return p;
}

Vector Box::vertex(std::uint64_t pattern) const {
    Vector v(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) v(k) = (pattern >> k) & 1u ? hi(k) : lo(k);
    return v;
}

}  // namespace roekit
