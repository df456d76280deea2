#include <doctest.h>

#include <random>

#include "exspec/algebra.hpp"

using namespace exspec;
using alg::cxd;
using alg::Mat;

namespace {

Mat random_matrix(int n, unsigned seed) {
    std::mt19937 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = cxd(dist(eng), dist(eng));
    }
    return m;
}

} // namespace

TEST_CASE("space strides and dimensions") {
    alg::Space sp({2, 3, 4});
    CHECK(sp.dim() == 24);
    CHECK(sp.stride(0) == 12);
    CHECK(sp.stride(1) == 4);
    CHECK(sp.stride(2) == 1);
}

TEST_CASE("local operator application matches dense embedding") {
    alg::Space sp({2, 3, 2});
    const Mat op = random_matrix(6, 7);  // acts on subsystems {1, 2}
    alg::LocalOp local(sp, op, {1, 2});
    const Mat full = local.embedded();
    const Mat a = random_matrix(sp.dim(), 13);

    Mat out;
    local.apply_left(a, out);
    CHECK((out - full * a).cwiseAbs().maxCoeff() < 1e-12);

    local.apply_right(a, out);
    CHECK((out - a * full).cwiseAbs().maxCoeff() < 1e-12);

    Mat scratch;
    local.conjugate(a, out, scratch);
    CHECK((out - full * a * full.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local operator on non-adjacent targets") {
    alg::Space sp({2, 2, 2});
    const Mat op = random_matrix(4, 3);
    alg::LocalOp local(sp, op, {0, 2});
    const Mat direct = local.embedded();
    // reference: permute indices by explicit kron with identity in the middle
    Mat expect = Mat::Zero(8, 8);
    for (int a0 = 0; a0 < 2; ++a0)
        for (int a2 = 0; a2 < 2; ++a2)
            for (int b0 = 0; b0 < 2; ++b0)
                for (int b2 = 0; b2 < 2; ++b2)
                    for (int mid = 0; mid < 2; ++mid) {
                        expect(a0 * 4 + mid * 2 + a2, b0 * 4 + mid * 2 + b2) =
                            op(a0 * 2 + a2, b0 * 2 + b2);
                    }
    CHECK((direct - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace keep") {
    alg::Space sp({2, 3});
    const Mat a = random_matrix(2, 21);
    const Mat b = random_matrix(3, 22);
    const Mat ab = alg::kron(a, b);
    const Mat ta = alg::partial_trace_keep(sp, ab, {0});
    CHECK((ta - a * b.trace()).cwiseAbs().maxCoeff() < 1e-12);
    const Mat tb = alg::partial_trace_keep(sp, ab, {1});
    CHECK((tb - b * a.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reset subsystem") {
    alg::Space sp({2, 2});
    Mat rho = random_matrix(4, 5);
    rho = rho * rho.adjoint();
    rho /= rho.trace();
    Mat out;
    alg::reset_subsystem(sp, rho, 1, out);
    CHECK(std::abs(out.trace() - cxd(1.0, 0.0)) < 1e-12);
    // subsystem 1 ends in its ground level
    const Mat reduced = alg::partial_trace_keep(sp, out, {1});
    CHECK(std::abs(reduced(0, 0) - cxd(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(reduced(1, 1)) < 1e-12);
    // subsystem 0 marginal is unchanged
    const Mat m0_before = alg::partial_trace_keep(sp, rho, {0});
    const Mat m0_after = alg::partial_trace_keep(sp, out, {0});
    CHECK((m0_before - m0_after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gray code adjacency") {
    for (int d : {2, 3, 4, 6, 8, 16}) {
        for (int n = 0; n + 1 < d; ++n) {
            const int diff = alg::gray_code(n) ^ alg::gray_code(n + 1);
            CHECK(diff != 0);
            CHECK((diff & (diff - 1)) == 0);  // exactly one bit
        }
    }
}

TEST_CASE("gray lift preserves matrix elements") {
    const int d = 3;
    const Mat a = alg::boson_annihilation(d);
    const Mat lifted = alg::gray_lift(a, d);
    CHECK(lifted.rows() == 4);
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            CHECK(std::abs(lifted(alg::gray_code(n), alg::gray_code(m)) - a(n, m)) < 1e-14);
        }
    }
}

TEST_CASE("pauli decomposition round trip") {
    Mat h = random_matrix(4, 11);
    h = (h + Mat(h.adjoint())) / 2.0;
    const auto terms = alg::pauli_decompose(h);
    Mat rebuilt = Mat::Zero(4, 4);
    for (const auto& t : terms) rebuilt += t.coeff * alg::pauli_string_matrix(t.ops);
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& t : terms) CHECK(std::abs(t.coeff.imag()) < 1e-12);
}

TEST_CASE("expm agrees with eigendecomposition for hermitian generators") {
    Mat h = random_matrix(5, 31);
    h = (h + Mat(h.adjoint())) / 2.0;
    const Mat u = alg::expm(Mat(cxd(0.0, -1.0) * h));
    CHECK((u * u.adjoint() - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat ref = Mat::Zero(5, 5);
    for (int k = 0; k < 5; ++k) {
        ref += std::exp(cxd(0.0, -es.eigenvalues()(k))) * es.eigenvectors().col(k) *
               es.eigenvectors().col(k).adjoint();
    }
    CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-12);
}
