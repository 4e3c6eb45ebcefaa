#pragma once

// Exact complex state vectors and sparse linear operators over named modes.
// Mode spaces are open-ended maps: absorption sinks like "abs:7" appear
// dynamically, so nothing here assumes a fixed dimension. Values are
// immutable after construction and every operation is a pure function.

#include <atomic>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cfc/errors.hpp"

namespace cfc {

using Complex = std::complex<double>;
using ModeLabel = std::string;

namespace detail {
inline std::atomic<double>& tolerance_slot() {
    static std::atomic<double> tol{1e-12};
    return tol;
}
}  // namespace detail

/// Absolute tolerance used by normalization/unitarity checks and by the
/// zero-overlap guards. Default 1e-12; the CLI may override it from the
/// CFC_LAB_TOLERANCE environment variable.
inline double comparison_tolerance() {
    return detail::tolerance_slot().load(std::memory_order_relaxed);
}

inline void set_comparison_tolerance(double tol) {
    if (!(tol > 0.0)) throw DomainError("comparison tolerance must be positive");
    detail::tolerance_slot().store(tol, std::memory_order_relaxed);
}

class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(std::map<ModeLabel, Complex> amplitudes)
        : amps_(std::move(amplitudes)) {}

    static StateVector basis(const ModeLabel& mode) {
        return StateVector({{mode, Complex(1.0, 0.0)}});
    }

    /// Amplitude of `mode`; absent modes are implicitly zero.
    Complex amplitude(const ModeLabel& mode) const {
        auto it = amps_.find(mode);
        return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
    }

    const std::map<ModeLabel, Complex>& amplitudes() const { return amps_; }

    bool has_mode(const ModeLabel& mode) const { return amps_.count(mode) != 0; }

    std::set<ModeLabel> modes() const {
        std::set<ModeLabel> out;
        for (const auto& [m, a] : amps_) out.insert(m);
        return out;
    }

    double norm_sq() const {
        double n = 0.0;
        for (const auto& [m, a] : amps_) n += std::norm(a);
        return n;
    }

    bool is_normalized(double tol) const { return std::abs(norm_sq() - 1.0) <= tol; }
    bool is_normalized() const { return is_normalized(comparison_tolerance()); }

    StateVector normalized() const {
        double n = std::sqrt(norm_sq());
        if (n <= comparison_tolerance()) throw DomainError("cannot normalize a zero state");
        std::map<ModeLabel, Complex> out;
        for (const auto& [m, a] : amps_) out.emplace(m, a / n);
        return StateVector(std::move(out));
    }

    /// Unnormalized restriction to the given modes (entries elsewhere dropped).
    StateVector restricted_to(const std::set<ModeLabel>& keep) const {
        std::map<ModeLabel, Complex> out;
        for (const auto& [m, a] : amps_)
            if (keep.count(m)) out.emplace(m, a);
        return StateVector(std::move(out));
    }

    friend StateVector operator*(const Complex& c, const StateVector& s) {
        std::map<ModeLabel, Complex> out;
        for (const auto& [m, a] : s.amps_) out.emplace(m, c * a);
        return StateVector(std::move(out));
    }

    friend StateVector operator+(const StateVector& x, const StateVector& y) {
        std::map<ModeLabel, Complex> out = x.amps_;
        for (const auto& [m, a] : y.amps_) out[m] += a;
        return StateVector(std::move(out));
    }

    friend StateVector operator-(const StateVector& x, const StateVector& y) {
        return x + (Complex(-1.0, 0.0) * y);
    }

  private:
    std::map<ModeLabel, Complex> amps_;
};

/// Builds a state from explicit (mode, amplitude) entries.
inline StateVector make_state(const std::vector<std::pair<ModeLabel, Complex>>& entries) {
    std::map<ModeLabel, Complex> amps;
    for (const auto& [m, a] : entries) {
        if (!amps.emplace(m, a).second) throw DuplicateLabel(m);
    }
    return StateVector(std::move(amps));
}

/// <bra|ket> = sum over modes of conj(bra_m) * ket_m.
inline Complex inner(const StateVector& bra, const StateVector& ket) {
    const auto& b = bra.amplitudes();
    const auto& k = ket.amplitudes();
    // Only the intersection of supports contributes.
    const bool b_smaller = b.size() <= k.size();
    const auto& small = b_smaller ? b : k;
    const auto& large = b_smaller ? k : b;
    Complex sum(0.0, 0.0);
    for (const auto& [m, a] : small) {
        auto it = large.find(m);
        if (it == large.end()) continue;
        Complex bv = b_smaller ? a : it->second;
        Complex kv = b_smaller ? it->second : a;
        sum += std::conj(bv) * kv;
    }
    return sum;
}

/// Sparse operator over named modes. Modes outside the support are either
/// passed through unchanged (gates: rotations, beamsplitters, phases) or
/// annihilated (projectors), selected at construction.
class LinearOperator {
  public:
    using Column = std::map<ModeLabel, Complex>;  // row -> entry

    static LinearOperator identity() { return LinearOperator({}, true); }

    static LinearOperator from_entries(
        const std::vector<std::tuple<ModeLabel, ModeLabel, Complex>>& row_col_value,
        bool identity_outside_support) {
        std::map<ModeLabel, Column> cols;
        for (const auto& [row, col, value] : row_col_value) cols[col][row] += value;
        return LinearOperator(std::move(cols), identity_outside_support);
    }

    /// Diagonal 0/1 projector on the given modes; everything else maps to zero.
    static LinearOperator projector(const std::set<ModeLabel>& modes) {
        if (modes.empty()) throw DomainError("projector requires a nonempty mode set");
        std::map<ModeLabel, Column> cols;
        for (const auto& m : modes) cols[m][m] = Complex(1.0, 0.0);
        return LinearOperator(std::move(cols), false);
    }

    /// Two-mode rotation: |from> -> cos a|from> + sin a|to>,
    /// |to> -> -sin a|from> + cos a|to>. Identity on every other mode.
    static LinearOperator rotation(const ModeLabel& from, const ModeLabel& to, double alpha) {
        if (from == to) throw DomainError("rotation requires two distinct modes");
        const double c = std::cos(alpha), s = std::sin(alpha);
        std::map<ModeLabel, Column> cols;
        cols[from][from] = c;
        cols[from][to] = s;
        cols[to][from] = -s;
        cols[to][to] = c;
        return LinearOperator(std::move(cols), true);
    }

    /// Beamsplitter with transmittance t2 = t^2:
    /// |h> -> t|h> + r|v>, |v> -> -r|h> + t|v>, with t, r >= 0.
    static LinearOperator beamsplitter(double t2, const ModeLabel& h, const ModeLabel& v) {
        if (h == v) throw DomainError("beamsplitter requires two distinct modes");
        if (!(t2 >= 0.0 && t2 <= 1.0)) throw DomainError("beamsplitter transmittance outside [0,1]");
        const double t = std::sqrt(t2), r = std::sqrt(1.0 - t2);
        std::map<ModeLabel, Column> cols;
        cols[h][h] = t;
        cols[h][v] = r;
        cols[v][h] = -r;
        cols[v][v] = t;
        return LinearOperator(std::move(cols), true);
    }

    static LinearOperator phase_shift(const ModeLabel& mode, double phi) {
        std::map<ModeLabel, Column> cols;
        cols[mode][mode] = std::polar(1.0, phi);
        return LinearOperator(std::move(cols), true);
    }

    /// Unitary exchange of two modes; used to move an amplitude into a sink.
    static LinearOperator swap_modes(const ModeLabel& a, const ModeLabel& b) {
        if (a == b) throw DomainError("swap requires two distinct modes");
        std::map<ModeLabel, Column> cols;
        cols[a][b] = Complex(1.0, 0.0);
        cols[b][a] = Complex(1.0, 0.0);
        return LinearOperator(std::move(cols), true);
    }

    bool identity_outside_support() const { return identity_outside_support_; }

    std::set<ModeLabel> support() const {
        std::set<ModeLabel> s;
        for (const auto& [col, rows] : cols_) {
            s.insert(col);
            for (const auto& [row, v] : rows) s.insert(row);
        }
        return s;
    }

    /// Stored entry at (row, col); implicit identity entries are not reported.
    Complex entry(const ModeLabel& row, const ModeLabel& col) const {
        auto c = cols_.find(col);
        if (c == cols_.end()) return Complex(0.0, 0.0);
        auto r = c->second.find(row);
        return r == c->second.end() ? Complex(0.0, 0.0) : r->second;
    }

    const std::map<ModeLabel, Column>& columns() const { return cols_; }

    LinearOperator adjoint() const {
        std::map<ModeLabel, Column> cols;
        for (const auto& [col, rows] : cols_)
            for (const auto& [row, v] : rows) cols[row][col] = std::conj(v);
        return LinearOperator(std::move(cols), identity_outside_support_);
    }

    /// U+U == I on the support, entrywise within tol.
    bool is_unitary(double tol) const {
        auto s = support();
        for (const auto& i : s)
            if (!cols_.count(i)) return false;  // a support mode with no column kills norm
        for (auto i = s.begin(); i != s.end(); ++i) {
            for (auto j = i; j != s.end(); ++j) {
                Complex g(0.0, 0.0);
                const auto& ci = cols_.at(*i);
                const auto& cj = cols_.at(*j);
                for (const auto& [row, v] : ci) {
                    auto it = cj.find(row);
                    if (it != cj.end()) g += std::conj(v) * it->second;
                }
                Complex expect = (*i == *j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
                if (std::abs(g - expect) > tol) return false;
            }
        }
        return true;
    }
    bool is_unitary() const { return is_unitary(comparison_tolerance()); }

    bool is_projector(double tol) const;
    bool is_projector() const { return is_projector(comparison_tolerance()); }

  private:
    LinearOperator(std::map<ModeLabel, Column> cols, bool identity_outside)
        : cols_(std::move(cols)), identity_outside_support_(identity_outside) {}

    std::map<ModeLabel, Column> cols_;
    bool identity_outside_support_ = true;
};

/// Matrix-vector product. Modes of the state outside the operator support are
/// passed through unchanged when the operator extends by identity, dropped
/// when it extends by zero (projectors).
inline StateVector apply(const LinearOperator& op, const StateVector& state) {
    std::map<ModeLabel, Complex> out;
    const auto support = op.support();
    for (const auto& [m, a] : state.amplitudes()) {
        auto col = op.columns().find(m);
        if (col != op.columns().end()) {
            for (const auto& [row, v] : col->second) out[row] += v * a;
        } else if (!support.count(m) && op.identity_outside_support()) {
            out[m] += a;
        }
        // A support mode without a column maps to zero.
    }
    return StateVector(std::move(out));
}

/// Operator product A*B with both factors extended by identity or zero
/// outside their supports, per their flags.
inline LinearOperator compose(const LinearOperator& a, const LinearOperator& b) {
    std::set<ModeLabel> domain = b.support();
    for (const auto& m : a.support()) domain.insert(m);
    std::vector<std::tuple<ModeLabel, ModeLabel, Complex>> entries;
    for (const auto& col : domain) {
        // Column of B for `col` under its off-support convention.
        std::map<ModeLabel, Complex> bcol;
        auto bit = b.columns().find(col);
        if (bit != b.columns().end()) {
            bcol = bit->second;
        } else if (b.identity_outside_support() && !b.support().count(col)) {
            bcol[col] = Complex(1.0, 0.0);
        }
        for (const auto& [k, bv] : bcol) {
            auto ait = a.columns().find(k);
            if (ait != a.columns().end()) {
                for (const auto& [row, av] : ait->second)
                    entries.emplace_back(row, col, av * bv);
            } else if (a.identity_outside_support() && !a.support().count(k)) {
                entries.emplace_back(k, col, bv);
            }
        }
    }
    return LinearOperator::from_entries(
        entries, a.identity_outside_support() && b.identity_outside_support());
}

inline bool LinearOperator::is_projector(double tol) const {
    // Hermitian: entry(r,c) == conj(entry(c,r)) over the support.
    for (const auto& [col, rows] : cols_)
        for (const auto& [row, v] : rows)
            if (std::abs(v - std::conj(entry(col, row))) > tol) return false;
    // Idempotent: P*P == P entrywise over the support.
    LinearOperator sq = compose(*this, *this);
    auto s = support();
    for (const auto& i : s)
        for (const auto& j : s)
            if (std::abs(sq.entry(i, j) - entry(i, j)) > tol) return false;
    return true;
}

/// <bra| Op |ket>.
inline Complex expectation(const StateVector& bra, const LinearOperator& op,
                           const StateVector& ket) {
    return inner(bra, apply(op, ket));
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
    double worst = 0.0;
    for (const auto& [m, v] : a.amplitudes()) worst = std::max(worst, std::abs(v - b.amplitude(m)));
    for (const auto& [m, v] : b.amplitudes()) worst = std::max(worst, std::abs(v - a.amplitude(m)));
    return worst;
}

inline bool approx_equal(const StateVector& a, const StateVector& b, double tol) {
    return max_abs_diff(a, b) <= tol;
}

/// True when b == e^{i phi} a for some single phase phi, entrywise within tol.
inline bool equal_up_to_global_phase(const StateVector& a, const StateVector& b, double tol) {
    // Anchor the phase on a's largest-magnitude entry.
    const ModeLabel* anchor = nullptr;
    double best = 0.0;
    for (const auto& [m, v] : a.amplitudes()) {
        if (std::abs(v) > best) {
            best = std::abs(v);
            anchor = &m;
        }
    }
    if (!anchor || best <= tol) return max_abs_diff(a, b) <= tol;  // both ~zero
    Complex ratio = b.amplitude(*anchor) / a.amplitude(*anchor);
    if (std::abs(std::abs(ratio) - 1.0) > tol / best) return false;
    Complex phase = ratio / std::abs(ratio);
    return approx_equal(phase * a, b, tol);
}

}  // namespace cfc
