#include "exspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exspec/units.hpp"

namespace exspec::spectra {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::vector<double> frame_frequencies(int n, double step_fs) {
    // ascending DFT frequencies in eV, centered on zero
    std::vector<double> w(static_cast<std::size_t>(n));
    const double dw = kTwoPi * units::hbar / (static_cast<double>(n) * step_fs);
    for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(j)] = dw * (j - n / 2);
    }
    return w;
}

// S(ω_j) = Δt Σ_k R_k exp(+i sense ω_j t_k / ħ) on the centered axis
Eigen::MatrixXcd dft_kernel(int n_out, int n_in, double step_fs, double start_fs, int sense) {
    Eigen::MatrixXcd f(n_out, n_in);
    const auto w = frame_frequencies(n_out, step_fs);
    for (int j = 0; j < n_out; ++j) {
        for (int k = 0; k < n_in; ++k) {
            const double t = start_fs + step_fs * k;
            const double phi = sense * w[static_cast<std::size_t>(j)] * t / units::hbar;
            f(j, k) = step_fs * std::exp(cxd(0.0, phi));
        }
    }
    return f;
}

} // namespace

response::ResponseGrid apply_rotating_frame(response::ResponseGrid grid, double omega_rf_ev) {
    if (omega_rf_ev == 0.0) {
        grid.provenance.rotating_frame_ev = 0.0;
        return grid;
    }
    const auto& axes = grid.axes;
    std::vector<int> idx(axes.size(), 0);
    const long npts = grid.points();
    for (long lin = 0; lin < npts; ++lin) {
        long rem = lin;
        for (std::size_t k = axes.size(); k-- > 0;) {
            idx[k] = static_cast<int>(rem % axes[k].count);
            rem /= axes[k].count;
        }
        double phase = 0.0;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const int sense = grid.senses.empty() ? 0 : grid.senses[k];
            if (sense == 0) continue;
            const double t = axes[k].start_fs + axes[k].step_fs * idx[k];
            phase += sense * omega_rf_ev * t / units::hbar;
        }
        grid.values[static_cast<std::size_t>(lin)] *= std::exp(cxd(0.0, phase));
    }
    grid.provenance.rotating_frame_ev = omega_rf_ev;
    return grid;
}

double shot_noise_floor(const response::ResponseGrid& grid) {
    if (grid.variance.empty()) return 0.0;
    double mean = 0.0;
    for (double v : grid.variance) mean += v;
    mean /= static_cast<double>(grid.variance.size());
    return std::sqrt(mean);
}

namespace {

// first index whose forward running-max of |R| falls below the floor
int cut_index_of(const std::vector<double>& abs_marginal, double floor) {
    const int n = static_cast<int>(abs_marginal.size());
    const int window = 3;
    for (int i = 0; i < n; ++i) {
        double env = 0.0;
        for (int k = i; k < std::min(n, i + window); ++k) {
            env = std::max(env, abs_marginal[static_cast<std::size_t>(k)]);
        }
        if (env < floor) return i;
    }
    return n;
}

} // namespace

response::ResponseGrid snr_cut_and_pad(const response::ResponseGrid& grid,
                                       double noise_floor_estimate, int pad_to,
                                       std::vector<int>* cut_indices) {
    if (noise_floor_estimate < 0.0) {
        throw std::invalid_argument("snr_cut_and_pad: noise floor must be >= 0");
    }
    const auto& axes = grid.axes;
    for (const auto& a : axes) {
        if (a.count > 1 && pad_to < a.count) {
            throw std::invalid_argument("snr_cut_and_pad: pad_to must be >= original length");
        }
    }

    response::ResponseGrid cur = grid;
    if (cut_indices) cut_indices->assign(axes.size(), -1);

    for (std::size_t ax = 0; ax < axes.size(); ++ax) {
        const int sense = cur.senses.empty() ? 0 : cur.senses[ax];
        if (sense == 0 || cur.axes[ax].count <= 1) continue;
        const int n_old = cur.axes[ax].count;

        // marginal envelope: max |R| over all other axes per index of this axis
        std::vector<double> marg(static_cast<std::size_t>(n_old), 0.0);
        {
            std::vector<int> idx(cur.axes.size(), 0);
            const long npts = cur.points();
            for (long lin = 0; lin < npts; ++lin) {
                long rem = lin;
                for (std::size_t k = cur.axes.size(); k-- > 0;) {
                    idx[k] = static_cast<int>(rem % cur.axes[k].count);
                    rem /= cur.axes[k].count;
                }
                auto& slot = marg[static_cast<std::size_t>(idx[ax])];
                slot = std::max(slot, std::abs(cur.values[static_cast<std::size_t>(lin)]));
            }
        }
        int cut = n_old;
        if (noise_floor_estimate > 0.0) {
            cut = cut_index_of(marg, noise_floor_estimate);
        }
        if (cut_indices) (*cut_indices)[ax] = (cut < n_old) ? cut : -1;

        // rebuild with this axis zeroed beyond the cut and padded to pad_to
        response::ResponseGrid next = cur;
        next.axes[ax].count = pad_to;
        next.values.assign(static_cast<std::size_t>(next.points()), cxd(0.0, 0.0));
        if (!cur.variance.empty()) {
            next.variance.assign(static_cast<std::size_t>(next.points()), 0.0);
        }
        std::vector<int> idx(cur.axes.size(), 0);
        const long npts = cur.points();
        for (long lin = 0; lin < npts; ++lin) {
            long rem = lin;
            for (std::size_t k = cur.axes.size(); k-- > 0;) {
                idx[k] = static_cast<int>(rem % cur.axes[k].count);
                rem /= cur.axes[k].count;
            }
            if (idx[ax] >= cut) continue;
            const long to = next.index(idx);
            next.values[static_cast<std::size_t>(to)] = cur.values[static_cast<std::size_t>(lin)];
            if (!cur.variance.empty()) {
                next.variance[static_cast<std::size_t>(to)] = cur.variance[static_cast<std::size_t>(lin)];
            }
        }
        cur = std::move(next);
    }
    return cur;
}

response::ResponseGrid apply_hann_window(const response::ResponseGrid& grid) {
    response::ResponseGrid out = grid;
    std::vector<int> idx(grid.axes.size(), 0);
    const long npts = grid.points();
    for (long lin = 0; lin < npts; ++lin) {
        long rem = lin;
        for (std::size_t k = grid.axes.size(); k-- > 0;) {
            idx[k] = static_cast<int>(rem % grid.axes[k].count);
            rem /= grid.axes[k].count;
        }
        double w = 1.0;
        for (std::size_t k = 0; k < grid.axes.size(); ++k) {
            const int sense = grid.senses.empty() ? 0 : grid.senses[k];
            if (sense == 0 || grid.axes[k].count <= 1) continue;
            const double x = static_cast<double>(idx[k]) / (grid.axes[k].count - 1);
            w *= 0.5 * (1.0 + std::cos(3.14159265358979323846 * x));
        }
        out.values[static_cast<std::size_t>(lin)] *= w;
    }
    return out;
}

Spectrum1D absorption_spectrum(const response::ResponseGrid& grid) {
    if (grid.axes.size() != 1) {
        throw std::invalid_argument("absorption_spectrum: expected a single delay axis");
    }
    const int n = grid.axes[0].count;
    const int sense = grid.senses.empty() ? 1 : grid.senses[0];
    const auto f = dft_kernel(n, n, grid.axes[0].step_fs, grid.axes[0].start_fs, sense);
    Eigen::VectorXcd r(n);
    for (int k = 0; k < n; ++k) r(k) = grid.values[static_cast<std::size_t>(k)];
    const Eigen::VectorXcd s = f * r;
    Spectrum1D out;
    out.rotating_frame_ev = grid.provenance.rotating_frame_ev;
    out.pad_length = n;
    const auto w = frame_frequencies(n, grid.axes[0].step_fs);
    out.omega_ev.resize(static_cast<std::size_t>(n));
    out.amplitude.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        out.omega_ev[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] + out.rotating_frame_ev;
        out.amplitude[static_cast<std::size_t>(j)] = s(j).real();
    }
    return out;
}

Spectrum2D spectrum_2d(const std::vector<response::ResponseGrid>& pathway_grids, double t2_fs) {
    if (pathway_grids.empty()) throw std::invalid_argument("spectrum_2d: no pathway grids");
    const auto& g0 = pathway_grids.front();
    if (g0.axes.size() != 3 || g0.axes[1].count != 1) {
        throw std::invalid_argument("spectrum_2d: expected axes (t1, fixed t2, t3)");
    }
    for (const auto& g : pathway_grids) {
        if (g.axes.size() != 3 || g.axes[0].count != g0.axes[0].count ||
            g.axes[2].count != g0.axes[2].count || g.axes[1].count != 1) {
            throw std::invalid_argument("spectrum_2d: pathway grids have mismatched axes");
        }
    }
    const int n1 = g0.axes[0].count;
    const int n3 = g0.axes[2].count;

    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n1, n3);
    for (const auto& g : pathway_grids) {
        for (int i = 0; i < n1; ++i) {
            for (int k = 0; k < n3; ++k) {
                r(i, k) += g.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n3) +
                                    static_cast<std::size_t>(k)];
            }
        }
    }
    const int sense1 = g0.senses.empty() ? -1 : g0.senses[0];
    const int sense3 = g0.senses.empty() ? 1 : g0.senses[2];
    const auto f1 = dft_kernel(n1, n1, g0.axes[0].step_fs, g0.axes[0].start_fs, sense1);
    const auto f3 = dft_kernel(n3, n3, g0.axes[2].step_fs, g0.axes[2].start_fs, sense3);
    const Eigen::MatrixXcd s = f1 * r * f3.transpose();

    Spectrum2D out;
    out.t2_fs = t2_fs;
    out.rotating_frame_ev = g0.provenance.rotating_frame_ev;
    for (const auto& g : pathway_grids) out.pathways.push_back(g.pathway);
    const auto w1 = frame_frequencies(n1, g0.axes[0].step_fs);
    const auto w3 = frame_frequencies(n3, g0.axes[2].step_fs);
    out.omega1_ev.resize(static_cast<std::size_t>(n1));
    out.omega3_ev.resize(static_cast<std::size_t>(n3));
    for (int j = 0; j < n1; ++j) out.omega1_ev[static_cast<std::size_t>(j)] = w1[static_cast<std::size_t>(j)] + out.rotating_frame_ev;
    for (int j = 0; j < n3; ++j) out.omega3_ev[static_cast<std::size_t>(j)] = w3[static_cast<std::size_t>(j)] + out.rotating_frame_ev;
    out.amplitude = s.cwiseAbs();
    return out;
}

int peak_bin(const Spectrum1D& s) {
    int best = 0;
    for (std::size_t j = 1; j < s.amplitude.size(); ++j) {
        if (s.amplitude[j] > s.amplitude[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
    }
    return best;
}

double peak_position(const Spectrum1D& s) {
    return s.omega_ev[static_cast<std::size_t>(peak_bin(s))];
}

double fwhm(const Spectrum1D& s) {
    const int p = peak_bin(s);
    const double half = s.amplitude[static_cast<std::size_t>(p)] / 2.0;
    const int n = static_cast<int>(s.amplitude.size());
    double left = s.omega_ev.front();
    double right = s.omega_ev.back();
    for (int j = p; j >= 1; --j) {
        const double a1 = s.amplitude[static_cast<std::size_t>(j)];
        const double a0 = s.amplitude[static_cast<std::size_t>(j - 1)];
        if (a0 <= half && a1 >= half) {
            const double f = (half - a0) / (a1 - a0);
            left = s.omega_ev[static_cast<std::size_t>(j - 1)] +
                   f * (s.omega_ev[static_cast<std::size_t>(j)] - s.omega_ev[static_cast<std::size_t>(j - 1)]);
            break;
        }
    }
    for (int j = p; j + 1 < n; ++j) {
        const double a1 = s.amplitude[static_cast<std::size_t>(j)];
        const double a0 = s.amplitude[static_cast<std::size_t>(j + 1)];
        if (a0 <= half && a1 >= half) {
            const double f = (a1 - half) / (a1 - a0);
            right = s.omega_ev[static_cast<std::size_t>(j)] +
                    f * (s.omega_ev[static_cast<std::size_t>(j + 1)] - s.omega_ev[static_cast<std::size_t>(j)]);
            break;
        }
    }
    return right - left;
}

double amplitude_at(const Spectrum2D& s, double w1_ev, double w3_ev) {
    auto nearest = [](const std::vector<double>& axis, double w) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < axis.size(); ++j) {
            if (std::abs(axis[j] - w) < std::abs(axis[best] - w)) best = j;
        }
        return best;
    };
    return s.amplitude(static_cast<Eigen::Index>(nearest(s.omega1_ev, w1_ev)),
                       static_cast<Eigen::Index>(nearest(s.omega3_ev, w3_ev)));
}

double window_kurtosis(const Spectrum1D& s, double half_window_ev) {
    const int p = peak_bin(s);
    const double center = s.omega_ev[static_cast<std::size_t>(p)];
    double norm = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t j = 0; j < s.omega_ev.size(); ++j) {
        const double d = s.omega_ev[j] - center;
        if (std::abs(d) > half_window_ev) continue;
        const double a = std::max(0.0, s.amplitude[j]);
        norm += a;
        m2 += a * d * d;
        m4 += a * d * d * d * d;
    }
    if (norm <= 0.0 || m2 <= 0.0) return 0.0;
    m2 /= norm;
    m4 /= norm;
    return m4 / (m2 * m2);
}

} // namespace exspec::spectra
