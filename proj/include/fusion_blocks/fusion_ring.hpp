#pragma once
// Fusion rings: labels, dagger involution, integer fusion tensor N_{i,j}^k,
// axiom verification and the average matrix.

#include "fusion_blocks/exact.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fb::fusion {

/// Malformed ring data: sizes, permutations, negative entries.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The ring fails an axiom that an operation relies on.
class AxiomError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Unknown label name; message lists the valid labels.
class LabelError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Square matrix of arbitrary-precision integers.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(size_t n) : n_(n), a_(n * n, Integer(0)) {}

    static IntMatrix identity(size_t n) {
        IntMatrix m(n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    size_t size() const { return n_; }
    Integer& operator()(size_t i, size_t j) { return a_[i * n_ + j]; }
    const Integer& operator()(size_t i, size_t j) const { return a_[i * n_ + j]; }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.n_ != y.n_) throw StructuralError("IntMatrix product: size mismatch");
        IntMatrix r(x.n_);
        for (size_t i = 0; i < x.n_; ++i)
            for (size_t k = 0; k < x.n_; ++k) {
                const Integer& xik = x(i, k);
                if (xik == 0) continue;
                for (size_t j = 0; j < x.n_; ++j)
                    if (y(k, j) != 0) r(i, j) += xik * y(k, j);
            }
        return r;
    }
    IntMatrix& operator+=(const IntMatrix& o) {
        if (n_ != o.n_) throw StructuralError("IntMatrix sum: size mismatch");
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    friend IntMatrix operator+(IntMatrix x, const IntMatrix& y) { return x += y; }
    friend IntMatrix operator*(const Integer& s, IntMatrix x) {
        for (auto& e : x.a_) e *= s;
        return x;
    }
    friend bool operator==(const IntMatrix& x, const IntMatrix& y) { return x.n_ == y.n_ && x.a_ == y.a_; }

    IntMatrix transpose() const {
        IntMatrix r(n_);
        for (size_t i = 0; i < n_; ++i)
            for (size_t j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Integer trace() const {
        Integer t = 0;
        for (size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }
    IntMatrix pow(unsigned e) const {
        IntMatrix r = identity(n_), b = *this;
        for (; e; e >>= 1, b = b * b)
            if (e & 1) r = r * b;
        return r;
    }

    std::vector<std::vector<std::string>> rows() const {
        std::vector<std::vector<std::string>> out(n_);
        for (size_t i = 0; i < n_; ++i)
            for (size_t j = 0; j < n_; ++j) out[i].push_back((*this)(i, j).get_str());
        return out;
    }
    std::string str() const {
        std::string s = "[";
        for (size_t i = 0; i < n_; ++i) {
            s += i ? ",[" : "[";
            for (size_t j = 0; j < n_; ++j) s += (j ? "," : "") + (*this)(i, j).get_str();
            s += "]";
        }
        return s + "]";
    }

private:
    size_t n_ = 0;
    std::vector<Integer> a_;
};

/// Immutable fusion data; index 0 is the vacuum.
class FusionData {
public:
    FusionData() = default;

    /// tensor[i][j][k] = N_{i,j}^k.  Throws StructuralError on inconsistent sizes,
    /// a dual that is not a permutation, or negative multiplicities.
    FusionData(std::vector<std::string> labels, std::vector<int> dual,
               const std::vector<std::vector<std::vector<Integer>>>& tensor)
        : labels_(std::move(labels)), dual_(std::move(dual)) {
        const size_t r = labels_.size();
        if (r == 0) throw StructuralError("fusion data: at least the vacuum label is required");
        if (dual_.size() != r)
            throw StructuralError("fusion data: dual has " + std::to_string(dual_.size()) + " entries, expected " +
                                  std::to_string(r));
        std::vector<bool> seen(r);
        for (size_t i = 0; i < r; ++i) {
            const int d = dual_[i];
            if (d < 0 || static_cast<size_t>(d) >= r || seen[d])
                throw StructuralError("fusion data: dual is not a permutation (entry " + std::to_string(i) + ")");
            seen[d] = true;
        }
        if (tensor.size() != r) throw StructuralError("fusion data: tensor has wrong first dimension");
        n_.reserve(r * r * r);
        for (size_t i = 0; i < r; ++i) {
            if (tensor[i].size() != r)
                throw StructuralError("fusion data: tensor[" + std::to_string(i) + "] has wrong dimension");
            for (size_t j = 0; j < r; ++j) {
                if (tensor[i][j].size() != r)
                    throw StructuralError("fusion data: tensor[" + std::to_string(i) + "][" + std::to_string(j) +
                                          "] has wrong dimension");
                for (size_t k = 0; k < r; ++k) {
                    if (tensor[i][j][k] < 0)
                        throw StructuralError("fusion data: negative multiplicity at (" + std::to_string(i) + "," +
                                              std::to_string(j) + "," + std::to_string(k) + ")");
                    n_.push_back(tensor[i][j][k]);
                }
            }
        }
    }

    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<int>& dual() const { return dual_; }
    int dual(int i) const { return dual_.at(check(i)); }
    const Integer& N(int i, int j, int k) const {
        const size_t r = size();
        return n_[(check(i) * r + check(j)) * r + check(k)];
    }
    std::vector<std::vector<std::vector<Integer>>> tensor() const {
        const size_t r = size();
        std::vector<std::vector<std::vector<Integer>>> t(r, std::vector<std::vector<Integer>>(r, std::vector<Integer>(r)));
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < r; ++j)
                for (size_t k = 0; k < r; ++k) t[i][j][k] = n_[(i * r + j) * r + k];
        return t;
    }

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == name) return static_cast<int>(i);
        std::string valid;
        for (const auto& l : labels_) valid += (valid.empty() ? "" : ", ") + l;
        throw LabelError("unknown label '" + name + "'; valid labels: " + valid);
    }

    size_t check(int i) const {
        if (i < 0 || static_cast<size_t>(i) >= size())
            throw std::out_of_range("label index " + std::to_string(i) + " out of range [0, " +
                                    std::to_string(size()) + ")");
        return static_cast<size_t>(i);
    }

    friend bool operator==(const FusionData& a, const FusionData& b) {
        return a.labels_ == b.labels_ && a.dual_ == b.dual_ && a.n_ == b.n_;
    }
    /// Same dual and tensor, labels ignored.
    bool same_structure(const FusionData& o) const { return dual_ == o.dual_ && n_ == o.n_; }

private:
    std::vector<std::string> labels_;
    std::vector<int> dual_;
    std::vector<Integer> n_;
};

struct AxiomViolation {
    std::string axiom;  // involution | identity | commutativity | associativity | transpose
    std::vector<int> witness;
    std::string str() const {
        std::string s = axiom + " (";
        for (size_t i = 0; i < witness.size(); ++i) s += (i ? "," : "") + std::to_string(witness[i]);
        return s + ")";
    }
};

namespace detail {

/// Tensor copied to 64-bit integers when all associativity sums fit.
inline std::optional<std::vector<std::int64_t>> small_tensor(const FusionData& ring) {
    const size_t r = ring.size();
    Integer max = 0;
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
            for (size_t k = 0; k < r; ++k)
                if (ring.N(i, j, k) > max) max = ring.N(i, j, k);
    if (max * max * Integer(static_cast<unsigned long>(r)) > Integer(1L << 60)) return std::nullopt;
    std::vector<std::int64_t> t(r * r * r);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
            for (size_t k = 0; k < r; ++k) t[(i * r + j) * r + k] = ring.N(i, j, k).get_si();
    return t;
}

template <class T, class Get>
void check_associativity(size_t r, Get N, std::vector<AxiomViolation>& out) {
    // sparse rows: for each (x, y) the nonzero z with N[x][y][z]
    std::vector<std::vector<std::pair<int, T>>> nz(r * r);
    for (size_t x = 0; x < r; ++x)
        for (size_t y = 0; y < r; ++y)
            for (size_t z = 0; z < r; ++z)
                if (N(x, y, z) != 0) nz[x * r + y].emplace_back(static_cast<int>(z), N(x, y, z));
    std::vector<T> lhs(r * r), rhs(r * r);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) {
            std::fill(lhs.begin(), lhs.end(), T(0));
            std::fill(rhs.begin(), rhs.end(), T(0));
            // lhs(k,l) = sum_W N[i][j][W] N[W][k][l]
            for (const auto& [w, nijw] : nz[i * r + j])
                for (size_t k = 0; k < r; ++k)
                    for (const auto& [l, nwkl] : nz[w * r + k]) lhs[k * r + l] += nijw * nwkl;
            // rhs(k,l) = sum_W N[j][k][W] N[i][W][l]
            for (size_t k = 0; k < r; ++k)
                for (const auto& [w, njkw] : nz[j * r + k])
                    for (const auto& [l, niwl] : nz[i * r + w]) rhs[k * r + l] += njkw * niwl;
            for (size_t k = 0; k < r; ++k)
                for (size_t l = 0; l < r; ++l)
                    if (lhs[k * r + l] != rhs[k * r + l]) {
                        out.push_back({"associativity",
                                       {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k), static_cast<int>(l)}});
                        return;
                    }
        }
}

} // namespace detail

/// Violated axioms with witnessing index tuples; empty iff the ring is valid.
/// `all` collects every violation of the cheap axioms instead of the first one.
inline std::vector<AxiomViolation> verify_axioms(const FusionData& ring, bool all = false) {
    std::vector<AxiomViolation> out;
    const int r = static_cast<int>(ring.size());
    auto report = [&](std::string axiom, std::vector<int> w) {
        if (all || out.empty() || out.back().axiom != axiom) out.push_back({std::move(axiom), std::move(w)});
    };
    if (ring.dual(0) != 0) report("involution", {0});
    for (int i = 0; i < r; ++i)
        if (ring.dual(ring.dual(i)) != i) report("involution", {i});
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k)
            if (ring.N(0, j, k) != (j == k ? 1 : 0)) report("identity", {0, j, k});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k)
                if (ring.N(i, j, k) != ring.N(j, i, k)) report("commutativity", {i, j, k});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k)
                if (ring.N(i, k, j) != ring.N(i, ring.dual(j), ring.dual(k))) report("transpose", {i, k, j});
    if (auto t = detail::small_tensor(ring)) {
        const size_t rr = ring.size();
        detail::check_associativity<std::int64_t>(
            rr, [&](size_t a, size_t b, size_t c) { return (*t)[(a * rr + b) * rr + c]; }, out);
    } else {
        detail::check_associativity<Integer>(
            ring.size(), [&](size_t a, size_t b, size_t c) { return ring.N(a, b, c); }, out);
    }
    return out;
}

/// W^i . W^j as (label, multiplicity) pairs with nonzero multiplicity.
inline std::vector<std::pair<int, Integer>> multiply(const FusionData& ring, int i, int j) {
    ring.check(i), ring.check(j);
    std::vector<std::pair<int, Integer>> out;
    for (int k = 0; k < static_cast<int>(ring.size()); ++k)
        if (ring.N(i, j, k) != 0) out.emplace_back(k, ring.N(i, j, k));
    return out;
}

/// (N_i)_j^k = N_{i,j}^k.
inline IntMatrix fusion_matrix(const FusionData& ring, int i) {
    ring.check(i);
    const size_t r = ring.size();
    IntMatrix m(r);
    for (size_t j = 0; j < r; ++j)
        for (size_t k = 0; k < r; ++k) m(j, k) = ring.N(i, j, k);
    return m;
}

/// W = sum_i N_i N_{i+}; cross-checked against sum_l Tr(N_{l+}) N_l.
inline IntMatrix average_matrix(const FusionData& ring) {
    if (auto v = verify_axioms(ring); !v.empty())
        throw AxiomError("average_matrix: ring violates " + v.front().str());
    const size_t r = ring.size();
    std::vector<IntMatrix> n;
    for (size_t i = 0; i < r; ++i) n.push_back(fusion_matrix(ring, static_cast<int>(i)));
    IntMatrix w(r), w2(r);
    for (size_t i = 0; i < r; ++i) {
        w += n[i] * n[ring.dual(i)];
        w2 += n[ring.dual(i)].trace() * n[i];
    }
    if (!(w == w2))
        throw std::logic_error("average_matrix: sum N_i N_i+ = " + w.str() + " differs from sum Tr(N_l+) N_l = " + w2.str());
    return w;
}

// JSON: {"labels": [...], "dual": [...], "tensor": [[[...]]]}
inline nlohmann::json to_json(const FusionData& ring) {
    nlohmann::json j;
    j["labels"] = ring.labels();
    j["dual"] = ring.dual();
    nlohmann::json t = nlohmann::json::array();
    const size_t r = ring.size();
    for (size_t a = 0; a < r; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t b = 0; b < r; ++b) {
            nlohmann::json col = nlohmann::json::array();
            for (size_t c = 0; c < r; ++c) {
                const Integer& v = ring.N(a, b, c);
                if (v.fits_slong_p()) col.push_back(v.get_si());
                else col.push_back(v.get_str());
            }
            row.push_back(std::move(col));
        }
        t.push_back(std::move(row));
    }
    j["tensor"] = std::move(t);
    return j;
}

/// Parse failures name the offending field.
inline FusionData from_json(const nlohmann::json& j) {
    auto field = [&](const char* name) -> const nlohmann::json& {
        if (!j.is_object() || !j.contains(name)) throw StructuralError(std::string("fusion data: missing field '") + name + "'");
        return j.at(name);
    };
    const auto& jl = field("labels");
    const auto& jd = field("dual");
    const auto& jt = field("tensor");
    if (!jl.is_array()) throw StructuralError("fusion data: field 'labels' must be an array of strings");
    if (!jd.is_array()) throw StructuralError("fusion data: field 'dual' must be an array of integers");
    if (!jt.is_array()) throw StructuralError("fusion data: field 'tensor' must be a nested array");
    std::vector<std::string> labels;
    for (size_t i = 0; i < jl.size(); ++i) {
        if (!jl[i].is_string()) throw StructuralError("fusion data: labels[" + std::to_string(i) + "] is not a string");
        labels.push_back(jl[i].get<std::string>());
    }
    std::vector<int> dual;
    for (size_t i = 0; i < jd.size(); ++i) {
        if (!jd[i].is_number_integer()) throw StructuralError("fusion data: dual[" + std::to_string(i) + "] is not an integer");
        dual.push_back(jd[i].get<int>());
    }
    std::vector<std::vector<std::vector<Integer>>> tensor;
    for (size_t a = 0; a < jt.size(); ++a) {
        const std::string pa = "tensor[" + std::to_string(a) + "]";
        if (!jt[a].is_array()) throw StructuralError("fusion data: " + pa + " is not an array");
        tensor.emplace_back();
        for (size_t b = 0; b < jt[a].size(); ++b) {
            const std::string pb = pa + "[" + std::to_string(b) + "]";
            if (!jt[a][b].is_array()) throw StructuralError("fusion data: " + pb + " is not an array");
            tensor.back().emplace_back();
            for (size_t c = 0; c < jt[a][b].size(); ++c) {
                const auto& e = jt[a][b][c];
                const std::string pc = pb + "[" + std::to_string(c) + "]";
                if (e.is_number_integer()) tensor.back().back().emplace_back(e.get<long>());
                else if (e.is_string()) {
                    Integer z;
                    if (z.set_str(e.get<std::string>(), 10) != 0) throw StructuralError("fusion data: " + pc + " is not an integer");
                    tensor.back().back().push_back(z);
                } else throw StructuralError("fusion data: " + pc + " is not an integer");
            }
        }
    }
    return FusionData(std::move(labels), std::move(dual), tensor);
}

} // namespace fb::fusion
