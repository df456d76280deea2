#include "exspec/algebra.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace exspec::alg {

Space::Space(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw std::invalid_argument("Space: no subsystems");
    }
    strides_.assign(dims_.size(), 1);
    for (int k = static_cast<int>(dims_.size()) - 2; k >= 0; --k) {
        strides_[static_cast<std::size_t>(k)] =
            strides_[static_cast<std::size_t>(k) + 1] * dims_[static_cast<std::size_t>(k) + 1];
    }
    dim_ = strides_[0] * dims_[0];
    for (int d : dims_) {
        if (d < 2) throw std::invalid_argument("Space: subsystem dimension must be >= 2");
    }
}

Space Space::qubits(int n) {
    return Space(std::vector<int>(static_cast<std::size_t>(n), 2));
}

LocalOp::LocalOp(const Space& space, Mat op, std::vector<int> targets)
    : dim_(space.dim()), op_(std::move(op)), targets_(std::move(targets)) {
    m_ = 1;
    for (int t : targets_) m_ *= space.dim_of(t);
    if (op_.rows() != m_ || op_.cols() != m_) {
        throw std::invalid_argument("LocalOp: operator dimension does not match targets");
    }
    op_dag_ = op_.adjoint();

    // offsets of all target index combinations (first target most significant)
    offsets_.assign(static_cast<std::size_t>(m_), 0);
    for (int combo = 0; combo < m_; ++combo) {
        int rem = combo;
        int off = 0;
        for (int ti = static_cast<int>(targets_.size()) - 1; ti >= 0; --ti) {
            const int t = targets_[static_cast<std::size_t>(ti)];
            const int d = space.dim_of(t);
            off += (rem % d) * space.stride(t);
            rem /= d;
        }
        offsets_[static_cast<std::size_t>(combo)] = off;
    }

    // base addresses: every full index whose target digits are all zero
    bases_.reserve(static_cast<std::size_t>(dim_ / m_));
    std::vector<bool> is_target(static_cast<std::size_t>(space.subsystems()), false);
    for (int t : targets_) is_target[static_cast<std::size_t>(t)] = true;
    for (int idx = 0; idx < dim_; ++idx) {
        bool base = true;
        for (std::size_t k = 0; k < is_target.size(); ++k) {
            if (is_target[k] && (idx / space.stride(static_cast<int>(k))) % space.dim_of(static_cast<int>(k)) != 0) {
                base = false;
                break;
            }
        }
        if (base) bases_.push_back(idx);
    }
}

void LocalOp::apply_left(const Mat& in, Mat& out) const {
    out.resize(dim_, dim_);
    const int nb = static_cast<int>(bases_.size());
    std::vector<cxd> buf(static_cast<std::size_t>(m_));
    for (int c = 0; c < dim_; ++c) {
        const cxd* col = in.col(c).data();
        cxd* ocol = out.col(c).data();
        for (int b = 0; b < nb; ++b) {
            const int base = bases_[static_cast<std::size_t>(b)];
            for (int i = 0; i < m_; ++i) buf[static_cast<std::size_t>(i)] = col[base + offsets_[static_cast<std::size_t>(i)]];
            for (int j = 0; j < m_; ++j) {
                cxd acc(0.0, 0.0);
                for (int i = 0; i < m_; ++i) acc += op_(j, i) * buf[static_cast<std::size_t>(i)];
                ocol[base + offsets_[static_cast<std::size_t>(j)]] = acc;
            }
        }
    }
}

void LocalOp::apply_right(const Mat& in, Mat& out) const {
    out.resize(dim_, dim_);
    // out(:, b+off[j]) = sum_i in(:, b+off[i]) * op(i, j)
    for (std::size_t bi = 0; bi < bases_.size(); ++bi) {
        const int base = bases_[bi];
        for (int j = 0; j < m_; ++j) {
            auto ocol = out.col(base + offsets_[static_cast<std::size_t>(j)]);
            ocol = in.col(base + offsets_[0]) * op_(0, j);
            for (int i = 1; i < m_; ++i) {
                ocol += in.col(base + offsets_[static_cast<std::size_t>(i)]) * op_(i, j);
            }
        }
    }
}

void LocalOp::conjugate(const Mat& in, Mat& out, Mat& scratch) const {
    apply_left(in, scratch);
    // out = scratch · op† : reuse apply_right pattern with op†
    out.resize(dim_, dim_);
    for (std::size_t bi = 0; bi < bases_.size(); ++bi) {
        const int base = bases_[bi];
        for (int j = 0; j < m_; ++j) {
            auto ocol = out.col(base + offsets_[static_cast<std::size_t>(j)]);
            ocol = scratch.col(base + offsets_[0]) * op_dag_(0, j);
            for (int i = 1; i < m_; ++i) {
                ocol += scratch.col(base + offsets_[static_cast<std::size_t>(i)]) * op_dag_(i, j);
            }
        }
    }
}

Mat LocalOp::embedded() const {
    Mat full = Mat::Zero(dim_, dim_);
    for (std::size_t bi = 0; bi < bases_.size(); ++bi) {
        const int base = bases_[bi];
        for (int j = 0; j < m_; ++j) {
            for (int i = 0; i < m_; ++i) {
                if (op_(j, i) != cxd(0.0, 0.0)) {
                    full(base + offsets_[static_cast<std::size_t>(j)], base + offsets_[static_cast<std::size_t>(i)]) = op_(j, i);
                }
            }
        }
    }
    return full;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Mat embed(const Space& space, const Mat& op, const std::vector<int>& targets) {
    return LocalOp(space, op, targets).embedded();
}

Mat partial_trace_keep(const Space& space, const Mat& a, const std::vector<int>& keep) {
    int kdim = 1;
    for (int k : keep) kdim *= space.dim_of(k);
    Mat out = Mat::Zero(kdim, kdim);

    const int n = space.subsystems();
    std::vector<int> kept_stride_out(static_cast<std::size_t>(n), 0);
    {
        int s = 1;
        for (int i = static_cast<int>(keep.size()) - 1; i >= 0; --i) {
            kept_stride_out[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])] = s;
            s *= space.dim_of(keep[static_cast<std::size_t>(i)]);
        }
    }
    std::vector<bool> is_kept(static_cast<std::size_t>(n), false);
    for (int k : keep) is_kept[static_cast<std::size_t>(k)] = true;

    const int dim = space.dim();
    std::vector<int> out_index(static_cast<std::size_t>(dim), 0);
    std::vector<int> env_index(static_cast<std::size_t>(dim), 0);
    for (int idx = 0; idx < dim; ++idx) {
        int oi = 0, ei = 0, emul = 1;
        for (int k = n - 1; k >= 0; --k) {
            const int digit = (idx / space.stride(k)) % space.dim_of(k);
            if (is_kept[static_cast<std::size_t>(k)]) {
                oi += digit * kept_stride_out[static_cast<std::size_t>(k)];
            } else {
                ei += digit * emul;
                emul *= space.dim_of(k);
            }
        }
        out_index[static_cast<std::size_t>(idx)] = oi;
        env_index[static_cast<std::size_t>(idx)] = ei;
    }
    for (int c = 0; c < dim; ++c) {
        for (int r = 0; r < dim; ++r) {
            if (env_index[static_cast<std::size_t>(r)] == env_index[static_cast<std::size_t>(c)]) {
                out(out_index[static_cast<std::size_t>(r)], out_index[static_cast<std::size_t>(c)]) += a(r, c);
            }
        }
    }
    return out;
}

void reset_subsystem(const Space& space, const Mat& in, int k, Mat& out) {
    const int dim = space.dim();
    const int s = space.stride(k);
    const int d = space.dim_of(k);
    out = Mat::Zero(dim, dim);
    // out = sum_b (|0><b|_k) in (|b><0|_k)
    for (int c = 0; c < dim; ++c) {
        const int cd = (c / s) % d;
        if (cd != 0) continue;
        for (int r = 0; r < dim; ++r) {
            const int rd = (r / s) % d;
            if (rd != 0) continue;
            cxd acc(0.0, 0.0);
            for (int b = 0; b < d; ++b) acc += in(r + b * s, c + b * s);
            out(r, c) = acc;
        }
    }
}

Mat expm(const Mat& a) {
    return a.exp();
}

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_y() {
    Mat m(2, 2);
    m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat sigma_plus() {
    Mat m = Mat::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

Mat sigma_minus() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Mat projector_excited() {
    Mat m = Mat::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

Mat identity(int d) {
    return Mat::Identity(d, d);
}

Mat boson_annihilation(int d) {
    Mat m = Mat::Zero(d, d);
    for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

Mat boson_number(int d) {
    Mat m = Mat::Zero(d, d);
    for (int n = 0; n < d; ++n) m(n, n) = static_cast<double>(n);
    return m;
}

int gray_code(int n) {
    return n ^ (n >> 1);
}

int qubits_for_levels(int d) {
    int q = 1;
    while ((1 << q) < d) ++q;
    return q;
}

Mat gray_lift(const Mat& mode_op, int d) {
    const int q = qubits_for_levels(d);
    const int full = 1 << q;
    Mat out = Mat::Zero(full, full);
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            out(gray_code(n), gray_code(m)) = mode_op(n, m);
        }
    }
    return out;
}

Mat pauli_string_matrix(const std::string& ops) {
    Mat out = Mat::Identity(1, 1);
    for (char c : ops) {
        switch (c) {
            case 'I': out = kron(out, identity(2)); break;
            case 'X': out = kron(out, pauli_x()); break;
            case 'Y': out = kron(out, pauli_y()); break;
            case 'Z': out = kron(out, pauli_z()); break;
            default: throw std::invalid_argument("pauli_string_matrix: bad label");
        }
    }
    return out;
}

std::vector<PauliTerm> pauli_decompose(const Mat& op, double tol) {
    const auto dim = op.rows();
    int q = 0;
    while ((1 << q) < dim) ++q;
    if ((1 << q) != dim || op.cols() != dim) {
        throw std::invalid_argument("pauli_decompose: operator must be 2^q square");
    }
    std::vector<PauliTerm> terms;
    const char labels[4] = {'I', 'X', 'Y', 'Z'};
    const int total = 1 << (2 * q);
    for (int code = 0; code < total; ++code) {
        std::string ops(static_cast<std::size_t>(q), 'I');
        int rem = code;
        for (int k = q - 1; k >= 0; --k) {
            ops[static_cast<std::size_t>(k)] = labels[rem % 4];
            rem /= 4;
        }
        const Mat p = pauli_string_matrix(ops);
        const cxd coeff = (p.adjoint() * op).trace() / static_cast<double>(dim);
        if (std::abs(coeff) > tol) {
            terms.push_back({ops, coeff});
        }
    }
    return terms;
}

} // namespace exspec::alg
