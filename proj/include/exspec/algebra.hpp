// algebra.hpp — Dense tensor algebra on registers of finite subsystems.
//
// A Space describes an ordered register of subsystems (qubits or truncated
// modes). Subsystem 0 is the most significant index: a basis state maps to
// index sum_k n_k * stride(k) with stride(last) = 1. Operators on density
// matrices are applied through LocalOp, which caches the address arithmetic
// for a fixed set of target subsystems.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace exspec::alg {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

class Space {
public:
    Space() = default;
    explicit Space(std::vector<int> dims);
    static Space qubits(int n);

    int subsystems() const { return static_cast<int>(dims_.size()); }
    int dim() const { return dim_; }
    int dim_of(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
    int stride(int k) const { return strides_.at(static_cast<std::size_t>(k)); }
    const std::vector<int>& dims() const { return dims_; }

private:
    std::vector<int> dims_;
    std::vector<int> strides_;
    int dim_{1};
};

// k-local operator bound to a Space; apply_* write into `out` (no aliasing).
class LocalOp {
public:
    LocalOp(const Space& space, Mat op, std::vector<int> targets);

    const Mat& matrix() const { return op_; }
    const std::vector<int>& targets() const { return targets_; }

    void apply_left(const Mat& in, Mat& out) const;   // (op ⊗ 1) · in
    void apply_right(const Mat& in, Mat& out) const;  // in · (op ⊗ 1)
    void conjugate(const Mat& in, Mat& out, Mat& scratch) const; // op · in · op†

    Mat embedded() const;  // dense full-dimension matrix

private:
    int dim_{0};
    int m_{0};                    // combined target dimension
    Mat op_;
    Mat op_dag_;
    std::vector<int> targets_;
    std::vector<int> offsets_;    // m_ addresses of target combinations
    std::vector<int> bases_;      // dim_/m_ base addresses (targets at 0)
};

Mat kron(const Mat& a, const Mat& b);
Mat embed(const Space& space, const Mat& op, const std::vector<int>& targets);

// Trace out every subsystem not listed in `keep` (keep is ascending).
Mat partial_trace_keep(const Space& space, const Mat& a, const std::vector<int>& keep);

// Trace out subsystem k and re-initialize it in its ground level.
void reset_subsystem(const Space& space, const Mat& in, int k, Mat& out);

Mat expm(const Mat& a);

// Qubit / mode primitives. Basis convention: index 0 = ground |g>,
// index 1 = excited |e>, so sigma_z = diag(1, -1) = |g><g| - |e><e|.
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat sigma_plus();   // |e><g|
Mat sigma_minus();  // |g><e|
Mat projector_excited();
Mat identity(int d);
Mat boson_annihilation(int d);
Mat boson_number(int d);

// Gray code utilities for encoding a d-level mode on ceil(log2 d) qubits.
int gray_code(int n);
int qubits_for_levels(int d);
// Lift a d×d mode operator to the 2^q-dimensional qubit space; matrix
// elements land on Gray-coded bitstrings, unused codes stay zero.
Mat gray_lift(const Mat& mode_op, int d);

struct PauliTerm {
    std::string ops;  // one of I,X,Y,Z per qubit, subsystem 0 first
    cxd coeff;
};

// Exact Pauli-string expansion of a 2^q × 2^q operator.
std::vector<PauliTerm> pauli_decompose(const Mat& op, double tol = 1e-13);
Mat pauli_string_matrix(const std::string& ops);

} // namespace exspec::alg
