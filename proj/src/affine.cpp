#include "gicr/affine.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gicr::affine {

Eigen::VectorXd AffineParams::drift(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = mu0;
    for (int i = 0; i < dim(); ++i) out += x[i] * mu[static_cast<std::size_t>(i)];
    return out;
}

Eigen::MatrixXd AffineParams::half_diffusion(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out = sigma0;
    for (int i = 0; i < dim(); ++i) out += x[i] * sigma[static_cast<std::size_t>(i)];
    return out;
}

namespace {

std::string idx(int i) { return std::to_string(i + 1); }

bool is_psd(const Eigen::MatrixXd& a) {
    if (!a.isApprox(a.transpose(), 1e-12) && (a - a.transpose()).norm() > 1e-12) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    return eig.eigenvalues().minCoeff() >= -1e-12;
}

}  // namespace

AdmissibilityReport validate_admissible(const AffineParams& p) {
    AdmissibilityReport report;
    auto& v = report.violations;
    const int d = p.dim();
    if (p.m < 0 || p.n < 0 || d == 0) {
        v.push_back("state dimension must be positive");
        return report;
    }
    if (p.mu0.size() != d || p.sigma0.rows() != d || p.sigma0.cols() != d ||
        static_cast<int>(p.mu.size()) != d || static_cast<int>(p.sigma.size()) != d) {
        v.push_back("parameter dimensions inconsistent with d = " + std::to_string(d));
        return report;
    }
    for (int i = 0; i < d; ++i) {
        if (p.mu[static_cast<std::size_t>(i)].size() != d ||
            p.sigma[static_cast<std::size_t>(i)].rows() != d ||
            p.sigma[static_cast<std::size_t>(i)].cols() != d) {
            v.push_back("parameter dimensions inconsistent with d = " + std::to_string(d));
            return report;
        }
    }

    if (!is_psd(p.sigma0)) v.push_back("sigma0 not PSD");
    for (int i = 0; i < p.m; ++i) {
        for (int j = 0; j < p.m; ++j) {
            if (p.sigma0(i, j) != 0.0) {
                v.push_back("sigma0 nonzero on the R+ block at (" + idx(i) + "," + idx(j) + ")");
            }
        }
    }
    for (int i = 0; i < d; ++i) {
        const auto& s = p.sigma[static_cast<std::size_t>(i)];
        if (!is_psd(s)) v.push_back("sigma" + idx(i) + " not PSD");
        if (i >= p.m) {
            if (s.norm() != 0.0) v.push_back("sigma" + idx(i) + " must vanish for an R coordinate");
            continue;
        }
        for (int k = 0; k < p.m; ++k) {
            if (k == i) continue;
            for (int l = 0; l < d; ++l) {
                if (s(k, l) != 0.0 || s(l, k) != 0.0) {
                    v.push_back("sigma" + idx(i) + " has entries in row/column " + idx(k) +
                                " of the R+ block");
                    k = p.m;
                    break;
                }
            }
        }
    }
    for (int i = 0; i < p.m; ++i) {
        if (p.mu0[i] < 0.0) v.push_back("drift points outward at boundary: mu0_" + idx(i) + " < 0");
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            const double c = p.mu[static_cast<std::size_t>(j)][i];
            if (j < p.m && c < 0.0) {
                v.push_back("drift points outward at boundary: (mu" + idx(j) + ")_" + idx(i) + " < 0");
            } else if (j >= p.m && c != 0.0) {
                v.push_back("R+ drift depends on R coordinate: (mu" + idx(j) + ")_" + idx(i) +
                            " != 0");
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

void PiecewiseRiccatiSolution::write_csv(std::ostream& os) const {
    os << "t,A";
    for (int k = 0; k < dim_; ++k) os << ",B_" << (k + 1);
    os << ",is_pre_atom_limit\n";
    auto row = [&](double t, const StateVector& y, int flag) {
        os << t;
        for (long k = 0; k < y.size(); ++k) os << ',' << y[k];
        os << ',' << flag << '\n';
    };
    const auto old_precision = os.precision(17);
    for (std::size_t k = 0; k < path_.times.size(); ++k) {
        if (path_.left_limits[k]) row(path_.times[k], *path_.left_limits[k], 1);
        row(path_.times[k], path_.values[k], 0);
    }
    os.precision(old_precision);
}

PiecewiseRiccatiSolution solve_riccati(const AffineParams& p, const HazardSpec& h,
                                       const RiskyMeasure& measure, double T, const Grid& grid) {
    const int d = p.dim();
    for (const auto& atom : h.atoms) {
        const long i = measure.find(atom.time);
        if (i < 0 || std::abs(measure[static_cast<std::size_t>(i)].weight - atom.weight) > 1e-12)
            throw std::invalid_argument("solve_riccati: hazard atom not an atom of the measure");
        if (atom.psi.size() != d) throw std::invalid_argument("solve_riccati: psi dimension");
    }
    std::vector<double> pts;
    for (double t : grid.points()) {
        if (t <= T + 1e-12) pts.push_back(t);
    }
    if (pts.empty() || std::abs(pts.back() - T) > 1e-12)
        throw std::invalid_argument("solve_riccati: grid must contain the maturity");
    const Grid truncated(std::move(pts));

    auto psi0 = [&](double t) -> Eigen::VectorXd {
        if (h.psi0) return h.psi0(t);
        return Eigen::VectorXd::Zero(d);
    };
    VectorField rhs = [&](double t, const StateVector& y) {
        const Eigen::VectorXd B = y.tail(d);
        StateVector dy(d + 1);
        dy[0] = -(h.phi0(t) + p.mu0.dot(B) - B.dot(p.sigma0 * B));
        const Eigen::VectorXd q0 = psi0(t);
        for (int k = 0; k < d; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            dy[k + 1] = -(q0[k] + p.mu[uk].dot(B) - B.dot(p.sigma[uk] * B));
        }
        return dy;
    };

    std::vector<JumpEvent> jumps;
    for (const auto& atom : h.atoms) {
        if (atom.time > T + 1e-12 || atom.time < truncated.front() - 1e-12) continue;
        StateVector inc(d + 1);
        inc[0] = atom.phi * atom.weight;
        inc.tail(d) = atom.psi * atom.weight;
        jumps.push_back({atom.time, inc});
    }
    auto path = rk4_backward_with_jumps(rhs, StateVector::Zero(d + 1), T, jumps, truncated);
    return PiecewiseRiccatiSolution(T, d, std::move(path));
}

// ---------------------------------------------------------------------------

double CirParams::theta() const { return std::sqrt(mu1 * mu1 + 2.0 * sigma * sigma); }

void CirParams::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("cir: sigma must be positive");
    if (!(mu0 >= 0.0)) throw std::invalid_argument("cir: mu0 must be nonnegative");
    if (!(psi1 >= 0.0)) throw std::invalid_argument("cir: psi1 must be nonnegative");
    if (!(u1 > 0.0)) throw std::invalid_argument("cir: u1 must be positive");
}

AffineParams CirParams::affine() const {
    AffineParams p;
    p.m = 1;
    p.n = 0;
    p.mu0 = Eigen::VectorXd::Constant(1, mu0);
    p.mu = {Eigen::VectorXd::Constant(1, mu1)};
    p.sigma0 = Eigen::MatrixXd::Zero(1, 1);
    p.sigma = {Eigen::MatrixXd::Constant(1, 1, 0.5 * sigma * sigma)};
    return p;
}

HazardSpec CirParams::hazard() const {
    HazardSpec h;
    h.phi0 = [](double) { return 0.0; };
    h.psi0 = [](double) { return Eigen::VectorXd::Ones(1).eval(); };
    h.atoms.push_back({u1, 1.0, 0.0, Eigen::VectorXd::Constant(1, psi1)});
    return h;
}

RiskyMeasure CirParams::measure() const { return RiskyMeasure({{u1, 1.0}}); }

namespace {

struct LFunctions {
    double l1, l2, l3, l4;
};

LFunctions l_functions(const CirParams& p, double s) {
    const double th = p.theta();
    const double em1 = std::expm1(th * s);
    const double ep1 = em1 + 2.0;
    return {2.0 * em1, th * ep1 + p.mu1 * em1, th * ep1 - p.mu1 * em1,
            p.sigma * p.sigma * em1};
}

// Riccati flow over time-to-go s started from B = v: returns (A increment, B).
Exponent cir_flow(const CirParams& p, double s, double v) {
    const double th = p.theta();
    const auto L = l_functions(p, s);
    const double denom = L.l3 + L.l4 * v;
    if (!(denom > 0.0)) throw std::domain_error("cir_closed_form: Riccati solution explodes");
    const double B = (L.l1 + L.l2 * v) / denom;
    const double A = -(2.0 * p.mu0 / (p.sigma * p.sigma)) *
                     (std::log(2.0 * th / denom) + 0.5 * (th - p.mu1) * s);
    return {A, B};
}

}  // namespace

Exponent cir_classical(const CirParams& p, double s) { return cir_flow(p, s, 0.0); }

Exponent cir_branch(const CirParams& p, double t, double T, bool spans_atom) {
    if (!spans_atom) return cir_classical(p, T - t);
    const Exponent tail = cir_classical(p, T - p.u1);
    const Exponent head = cir_flow(p, p.u1 - t, tail.B + p.psi1);
    return {tail.A + head.A, head.B};
}

Exponent cir_closed_form(const CirParams& p, double t, double T) {
    if (!(t >= 0.0) || !(t <= T)) throw std::invalid_argument("cir_closed_form: requires 0 <= t <= T");
    return cir_branch(p, t, T, t < p.u1 && p.u1 <= T);
}

double bond_price_affine(const PiecewiseRiccatiSolution& sol, const Eigen::VectorXd& x, double t,
                         const DefaultStatus& status) {
    if (t > sol.maturity() + 1e-12) throw std::invalid_argument("bond_price_affine: t > T");
    if (!status.alive_at(t)) return 0.0;
    return std::exp(-sol.A(t) - sol.B(t).dot(x));
}

// ---------------------------------------------------------------------------

namespace {

double atom_exponent(const HazardAtom& atom, const Eigen::VectorXd& x) {
    const double kappa = atom.phi + atom.psi.dot(x);
    if (kappa < 0.0) {
        std::ostringstream os;
        os << "hazard: negative atom exponent " << kappa << " at u=" << atom.time;
        throw std::domain_error(os.str());
    }
    return kappa;
}

double rate(const HazardSpec& h, double s, const Eigen::VectorXd& x) {
    double r = h.phi0(s);
    if (h.psi0) r += h.psi0(s).dot(x);
    return r;
}

}  // namespace

double hazard_eval(const HazardSpec& h, const StatePath& path, double t) {
    if (path.times.empty() || path.times.size() != path.states.size())
        throw std::invalid_argument("hazard_eval: malformed state path");
    double k = 0.0;
    for (std::size_t i = 1; i < path.times.size() && path.times[i] <= t + 1e-12; ++i) {
        const double a = path.times[i - 1], b = path.times[i];
        k += 0.5 * (b - a) * (rate(h, a, path.states[i - 1]) + rate(h, b, path.states[i]));
    }
    for (const auto& atom : h.atoms) {
        if (atom.time > t + 1e-12) continue;
        std::size_t j = 0;
        while (j < path.times.size() && std::abs(path.times[j] - atom.time) > 1e-12) ++j;
        if (j == path.times.size())
            throw std::invalid_argument("hazard_eval: atom time not on the path grid");
        k += atom_exponent(atom, path.states[j]);
    }
    return k;
}

HazardPath hazard_path(const HazardSpec& h, std::span<const double> times,
                       std::span<const double> scalar_states) {
    HazardPath out;
    out.times.assign(times.begin(), times.end());
    out.left.resize(times.size());
    out.right.resize(times.size());
    Eigen::VectorXd x(1), y(1);
    double k = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        y[0] = std::max(scalar_states[i], 0.0);
        if (i > 0) {
            x[0] = std::max(scalar_states[i - 1], 0.0);
            k += 0.5 * (times[i] - times[i - 1]) * (rate(h, times[i - 1], x) + rate(h, times[i], y));
        }
        out.left[i] = k;
        for (const auto& atom : h.atoms) {
            if (std::abs(atom.time - times[i]) <= 1e-12) k += atom_exponent(atom, y);
        }
        out.right[i] = k;
    }
    return out;
}

double compensator_jump(double kappa) { return -std::expm1(-kappa); }

// ---------------------------------------------------------------------------

CirAuditModel cir_audit_model(const CirParams& p, double x, double fd_step) {
    p.validate();
    const double h = fd_step;
    const double drift = p.mu0 + p.mu1 * x;
    const double vol = p.sigma * std::sqrt(std::max(x, 0.0));
    auto spans = [u = p.u1](double t, double T) { return t < u && u <= T; };
    auto exponent = [p, x](double t, double T, bool br) {
        const Exponent e = cir_branch(p, t, T, br);
        return e.A + e.B * x;
    };
    // Maturity derivatives of the exponent on the branch selected at (t, T).
    auto dT_B = [p, h, spans](double t, double T) {
        const bool br = spans(t, T);
        return (cir_branch(p, t, T + h, br).B - cir_branch(p, t, T - h, br).B) / (2.0 * h);
    };
    auto f_ac = [exponent, h, spans](double t, double T) {
        const bool br = spans(t, T);
        return (exponent(t, T + h, br) - exponent(t, T - h, br)) / (2.0 * h);
    };
    auto dt_dT_E = [exponent, h, spans](double t, double T) {
        const bool br = spans(t, T);
        return (exponent(t + h, T + h, br) - exponent(t + h, T - h, br) -
                exponent(t - h, T + h, br) + exponent(t - h, T - h, br)) /
               (4.0 * h * h);
    };
    // Maturity jump of the exponent at u1 seen from t < u1.
    auto jump_A = [p](double t) {
        return cir_branch(p, t, p.u1, true).A - cir_branch(p, t, p.u1, false).A;
    };
    auto jump_B = [p](double t) {
        return cir_branch(p, t, p.u1, true).B - cir_branch(p, t, p.u1, false).B;
    };

    CirAuditModel model;
    model.curve.measure = p.measure();
    model.curve.ac_part = f_ac;
    model.curve.atom_values = [jump_A, jump_B, x](double t, std::size_t) {
        return jump_A(t) + jump_B(t) * x;
    };

    model.coeffs.dim = 1;
    model.coeffs.a_ac = [dt_dT_E, dT_B, drift](double t, double T) {
        return dt_dT_E(t, T) + dT_B(t, T) * drift;
    };
    model.coeffs.b_ac = [dT_B, vol](double t, double T) {
        return Eigen::VectorXd::Constant(1, dT_B(t, T) * vol).eval();
    };
    model.coeffs.a_atom = [jump_A, jump_B, h, x, drift](double t, std::size_t) {
        const double dA = (jump_A(t + h) - jump_A(t - h)) / (2.0 * h);
        const double dB = (jump_B(t + h) - jump_B(t - h)) / (2.0 * h);
        return dA + dB * x + jump_B(t) * drift;
    };
    model.coeffs.b_atom = [jump_B, vol](double t, std::size_t) {
        return Eigen::VectorXd::Constant(1, jump_B(t) * vol).eval();
    };

    model.compensator.lambda = [x](double) { return x; };
    model.compensator.jumps.push_back({p.u1, 1.0, compensator_jump(p.psi1 * x)});
    model.short_rate = ShortRateModel{};
    return model;
}

}  // namespace gicr::affine
