#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/gates.hpp"
#include "qlab/state.hpp"

namespace qlab {

/// Largest register for which full unitaries are materialized.
inline constexpr int kMaxUnitaryQubits = 6;

/// Small dense complex matrix, row-major. Sized for unitary cross-checks of
/// the sparse kernels, not for performance.
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t dim)
        : dim_(dim), data_(dim * dim, amp_t{0.0, 0.0}) {}

    static DenseMatrix identity(std::size_t dim) {
        DenseMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return dim_; }

    amp_t& at(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
    const amp_t& at(std::size_t row, std::size_t col) const {
        return data_[row * dim_ + col];
    }

    DenseMatrix operator*(const DenseMatrix& rhs) const {
        DenseMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t k = 0; k < dim_; ++k) {
                const amp_t lik = at(i, k);
                if (lik == amp_t{}) continue;
                for (std::size_t j = 0; j < dim_; ++j) {
                    out.at(i, j) += lik * rhs.at(k, j);
                }
            }
        }
        return out;
    }

    std::vector<amp_t> apply(const std::vector<amp_t>& v) const {
        std::vector<amp_t> out(dim_, amp_t{0.0, 0.0});
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                out[i] += at(i, j) * v[j];
            }
        }
        return out;
    }

    DenseMatrix adjoint() const {
        DenseMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                out.at(i, j) = std::conj(at(j, i));
            }
        }
        return out;
    }

    double max_abs_diff(const DenseMatrix& other) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
        }
        return worst;
    }

    bool is_unitary(double tol) const {
        return (adjoint() * *this).max_abs_diff(identity(dim_)) <= tol;
    }

private:
    std::size_t dim_;
    std::vector<amp_t> data_;
};

/// Full 2^n x 2^n unitary of a (possibly controlled) gate, built column by
/// column from the gate's action on each basis state.
inline DenseMatrix gate_unitary(const Gate& gate, int num_qubits) {
    if (num_qubits > kMaxUnitaryQubits) {
        throw CapacityError("dense unitary limited to " +
                            std::to_string(kMaxUnitaryQubits) + " qubits");
    }
    validate_gate(gate, num_qubits);

    basis_t control_mask = 0;
    for (int c : gate.controls) control_mask |= qubit_bit(c);

    const std::size_t dim = std::size_t{1} << num_qubits;
    DenseMatrix u(dim);

    for (basis_t col = 0; col < dim; ++col) {
        if ((col & control_mask) != control_mask) {
            u.at(col, col) = 1.0;
            continue;
        }
        if (gate.kind == GateKind::Swap) {
            const basis_t m0 = qubit_bit(gate.targets[0]);
            const basis_t m1 = qubit_bit(gate.targets[1]);
            const bool bit0 = (col & m0) != 0;
            const bool bit1 = (col & m1) != 0;
            const basis_t row = bit0 != bit1 ? col ^ (m0 | m1) : col;
            u.at(row, col) = 1.0;
        } else {
            const Matrix2 m = single_qubit_matrix(gate.kind, gate.angle);
            const basis_t tmask = qubit_bit(gate.targets[0]);
            const bool one = (col & tmask) != 0;
            u.at(col & ~tmask, col) = one ? m.m01 : m.m00;
            u.at(col | tmask, col) = one ? m.m11 : m.m10;
        }
    }
    return u;
}

} // namespace qlab
