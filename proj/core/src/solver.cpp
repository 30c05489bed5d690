#include "ncr/solver.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <fftw3.h>

#include "ncr/error.hpp"

namespace ncr {

Grid1D Grid1D::make(bool periodic, double lo, double hi, int n) {
    if (n < 64 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size must be a power of two >= 64");
    if (!(hi > lo)) throw std::invalid_argument("grid interval is empty");
    return Grid1D{periodic, lo, hi, n};
}

std::vector<double> Grid1D::points() const {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = point(k);
    return x;
}

double GridSolution::max_norm_drift() const {
    double worst = 0.0;
    for (double v : norms) worst = std::max(worst, std::abs(v - norms.front()) / norms.front());
    return worst;
}

namespace {

// A scalar function of one variable with all other symbols bound.
class Function1 {
public:
    Function1(const Expr& e, const std::string& var, const Binding& params) : prog_({e}) {
        for (const auto& s : prog_.inputs()) {
            if (s == var) {
                slot_ = in_.size();
                in_.push_back(0.0);
                continue;
            }
            auto it = params.find(s);
            if (it == params.end()) throw Error(ErrorKind::UnboundSymbol, "symbol " + s + " has no value");
            in_.push_back(it->second);
        }
        constant_ = !e.depends_on(var);
    }
    Complex operator()(double x) const {
        if (slot_ < in_.size()) in_[slot_] = x;
        Complex out;
        prog_.run(in_.data(), &out, scratch_);
        return out;
    }
    bool constant() const { return constant_; }

private:
    Program prog_;
    mutable std::vector<Complex> in_;
    mutable std::vector<Complex> scratch_;
    std::size_t slot_ = static_cast<std::size_t>(-1);
    bool constant_ = false;
};

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    explicit FftPlans(std::vector<Complex>& buf) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        int n = static_cast<int>(buf.size());
        forward = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlans() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
};

double spectral_tail(const std::vector<Complex>& spectrum) {
    std::size_t n = spectrum.size();
    double total = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double e = std::norm(spectrum[k]);
        std::size_t m = k <= n / 2 ? k : n - k;
        total += e;
        if (3 * m > n) tail += e;
    }
    return total > 0 ? tail / total : 0.0;
}

Complex eval_bound(const Expr& e, const Binding& params) { return eval(e, params); }

}  // namespace

std::vector<Complex> sample(const Expr& f, const std::string& var, const std::vector<double>& xs,
                            const Binding& params) {
    Function1 fn(f, var, params);
    std::vector<Complex> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(fn(x));
    return out;
}

double discrete_norm(const std::vector<Complex>& psi, double dx) {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    return std::sqrt(s * dx);
}

double linf_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

GridSolution split_step_evolve(const ReducedEquation& eq, const Binding& params, const std::vector<Complex>& psi0,
                               const Grid1D& grid, double dt, int steps, int cadence) {
    if (eq.kind != EquationKind::TimeDependent)
        throw Error(ErrorKind::WrongEquation, "split-step evolution needs a time-dependent equation");
    if (static_cast<int>(psi0.size()) != grid.n) throw std::invalid_argument("initial data does not match the grid");
    const std::size_t n = static_cast<std::size_t>(grid.n);
    std::vector<double> xs = grid.points();

    Function1 c2(eq.c2, eq.var, params), c1(eq.c1, eq.var, params);
    if (!c2.constant() || !c1.constant())
        throw Error(ErrorKind::WrongEquation, "split-step evolution needs constant derivative coefficients");
    double hbar = (eval_bound(eq.time_coeff, params) / Complex(0, 1)).real();
    Complex a2 = c2(0.0), a1 = c1(0.0);

    if (!grid.periodic) {
        double edge = std::max(std::abs(psi0.front()), std::abs(psi0.back()));
        if (edge >= 1e-8) {
            std::ostringstream os;
            os << "initial data is " << edge << " at the box edge; expected below 1e-8";
            throw Error(ErrorKind::BoundaryContamination, os.str());
        }
    }

    Function1 W(eq.potential - eq.c0, eq.var, params), g(eq.nonlinear, eq.var, params);
    std::vector<Complex> veff(n), gk(n);
    for (std::size_t k = 0; k < n; ++k) {
        veff[k] = W(xs[k]);
        gk[k] = g(xs[k]);
    }
    std::vector<Complex> kinetic(n);
    double L = grid.length();
    for (std::size_t k = 0; k < n; ++k) {
        double m = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
        if (k == n / 2) m = 0.0;  // Nyquist mode carries no derivative
        double wave = 2.0 * M_PI * m / L;
        Complex symbol = a2 * wave * wave - Complex(0, 1) * a1 * wave;
        kinetic[k] = std::exp(Complex(0, -1) * symbol * dt / hbar) / static_cast<double>(n);
    }

    GridSolution sol;
    sol.grid = grid;
    sol.dt = dt;
    std::vector<Complex> psi = psi0;
    FftPlans plans(psi);
    auto* raw = reinterpret_cast<fftw_complex*>(psi.data());
    double dx = grid.spacing();
    sol.times.push_back(0.0);
    sol.frames.push_back(psi);
    sol.norms.push_back(discrete_norm(psi, dx));

    auto rotate = [&] {
        for (std::size_t k = 0; k < n; ++k) {
            Complex arg = veff[k] + gk[k] * std::norm(psi[k]);
            psi[k] *= std::exp(Complex(0, -1) * arg * (dt / (2.0 * hbar)));
        }
    };
    bool warned = false;
    for (int s = 1; s <= steps; ++s) {
        rotate();
        fftw_execute_dft(plans.forward, raw, raw);
        if (!warned && (s == 1 || s == steps || (cadence > 0 && s % cadence == 0))) {
            double tail = spectral_tail(psi);
            if (tail > 1e-6) {
                std::ostringstream os;
                os << "spectral tail " << tail << " of the norm at step " << s << " exceeds 1e-6; refine the grid";
                sol.warnings.push_back(os.str());
                warned = true;
            }
        }
        for (std::size_t k = 0; k < n; ++k) psi[k] *= kinetic[k];
        fftw_execute_dft(plans.backward, raw, raw);
        rotate();
        sol.norms.push_back(discrete_norm(psi, dx));
        if (s == steps || (cadence > 0 && s % cadence == 0)) {
            sol.times.push_back(s * dt);
            sol.frames.push_back(psi);
        }
    }
    return sol;
}

GridSolution ode_integrate(const ReducedEquation& eq, const Binding& params, Complex psi0, double q0, double q1,
                           int samples, Complex dpsi0) {
    if (eq.kind != EquationKind::Stationary)
        throw Error(ErrorKind::WrongEquation, "ODE integration needs a stationary equation");
    if (samples < 2) throw std::invalid_argument("at least two samples are required");
    bool first_order = eq.c2.is_zero();
    Function1 lead(first_order ? eq.c1 : eq.c2, eq.var, params);
    Function1 c1(eq.c1, eq.var, params), c0(eq.c0 - eq.potential + eq.energy, eq.var, params),
        g(eq.nonlinear, eq.var, params);

    double lo = std::min(q0, q1), hi = std::max(q0, q1), scale = 0.0, smallest = INFINITY;
    const int probes = 2001;
    for (int k = 0; k < probes; ++k) {
        double v = std::abs(lead(lo + (hi - lo) * k / (probes - 1)));
        scale = std::max(scale, v);
        smallest = std::min(smallest, v);
    }
    if (!(smallest > 1e-3 * scale)) {
        std::ostringstream os;
        os << "leading coefficient of the equation vanishes on [" << lo << ", " << hi << "]";
        throw Error(ErrorKind::SingularityApproach, os.str());
    }

    using State = std::vector<double>;
    auto rhs = [&](const State& s, State& ds, double x) {
        Complex psi(s[0], s[1]);
        Complex cube = g(x) * std::norm(psi) * psi;
        if (first_order) {
            Complex d = -(c0(x) * psi - cube) / c1(x);
            ds[0] = d.real();
            ds[1] = d.imag();
        } else {
            Complex dpsi(s[2], s[3]);
            Complex d2 = -(c1(x) * dpsi + c0(x) * psi - cube) / lead(x);
            ds[0] = dpsi.real();
            ds[1] = dpsi.imag();
            ds[2] = d2.real();
            ds[3] = d2.imag();
        }
    };
    State state = first_order ? State{psi0.real(), psi0.imag()}
                              : State{psi0.real(), psi0.imag(), dpsi0.real(), dpsi0.imag()};
    std::vector<double> xs(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) xs[static_cast<std::size_t>(k)] = q0 + (q1 - q0) * k / (samples - 1);

    GridSolution sol;
    sol.grid = Grid1D{false, lo, hi, samples};
    sol.frames.emplace_back();
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_dense_output(1e-12, 1e-10, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, state, xs.begin(), xs.end(), (q1 - q0) / (10.0 * samples),
                         [&](const State& s, double) { sol.frames.back().emplace_back(s[0], s[1]); });
    sol.times.push_back(0.0);
    return sol;
}

namespace {

Expr sech(const Expr& u) { return Expr(2) * pow(exp(u) + exp(-u), Rational(-1)); }

bool free_of(const Expr& e, const std::string& var, std::mt19937_64& rng) {
    if (!e.depends_on(var)) return true;
    SamplingBox box;
    return equiv(diff(e, var), Expr(0), box, 32, 1e-10, rng).equal;
}

Expr drop(const Expr& e, const std::string& var) { return e.depends_on(var) ? substitute(e, var, Expr(1)) : e; }

}  // namespace

SolutionFamily amplitude_phase_solve(const ReducedEquation& eq, int branch) {
    std::mt19937_64 rng(11);
    SamplingBox box;
    auto fail = [](const std::string& why) { throw Error(ErrorKind::WrongEquation, why); };
    if (eq.kind != EquationKind::Stationary) fail("amplitude-phase solution needs a stationary equation");
    if (!eq.c2.is_zero()) fail("amplitude-phase solution needs a first-order equation");
    if (!equiv(eq.potential, Expr(0), box, 32, 1e-12, rng).equal) fail("amplitude-phase solution needs W = 0");
    Expr q = sym(eq.var);
    Expr A = expand(eq.c1 / (Expr(2) * I() * q));
    if (!free_of(A, eq.var, rng)) fail("coefficient of psi' is not proportional to " + eq.var);
    A = drop(A, eq.var);
    if (!equiv(imag_part(A), Expr(0), box, 32, 1e-12, rng).equal) fail("coefficient of psi' is not 2 i A q'");
    Expr B = expand(eq.c0 - I() * A);
    if (!free_of(B, eq.var, rng) || !equiv(imag_part(B), Expr(0), box, 32, 1e-12, rng).equal)
        fail("zeroth-order coefficient is not i A + B with constant real B");
    B = drop(B, eq.var);
    if (!free_of(eq.nonlinear, eq.var, rng)) fail("nonlinear coefficient depends on " + eq.var);
    Expr N = drop(eq.nonlinear, eq.var);

    Expr s(branch >= 0 ? 1 : -1);
    Expr c = sym("c1");
    SolutionFamily fam;
    fam.name = "amplitude-phase";
    fam.var = eq.var;
    Expr C = sqrt(Expr(2) * A * c / N);
    fam.amplitude = C * pow(s * q, Rational(-1, 2));
    fam.phase = (B + sym(energy_symbol)) / (Expr(2) * A) * log(s * q) + s * c / q;
    fam.psi = fam.amplitude * exp(I() * fam.phase);
    fam.parameters = {"c1"};
    fam.validity = branch >= 0 ? eq.var + " > 0" : eq.var + " < 0";
    return fam;
}

SolutionFamily bright_soliton(const ReducedEquation& eq) {
    std::mt19937_64 rng(12);
    SamplingBox box;
    auto fail = [](const std::string& why) { throw Error(ErrorKind::WrongEquation, why); };
    if (eq.kind != EquationKind::TimeDependent) fail("bright soliton needs a time-dependent equation");
    if (!equiv(eq.c1, Expr(0), box, 32, 1e-12, rng).equal) fail("bright soliton needs c1 = 0");
    if (!free_of(eq.c2, eq.var, rng)) fail("bright soliton needs a constant kinetic coefficient");
    Expr C0 = reduce_trig(eq.c0 - eq.potential);
    if (!free_of(C0, eq.var, rng)) fail("bright soliton needs a constant potential");
    if (!free_of(eq.nonlinear, eq.var, rng)) fail("bright soliton needs a constant nonlinearity");
    Expr c2 = drop(eq.c2, eq.var), g = -drop(eq.nonlinear, eq.var);
    C0 = drop(C0, eq.var);
    Expr ratio = c2 / g;
    GuardedSampler sampler({ratio}, box);
    Program prog({ratio}, sampler.symbols());
    std::vector<Complex> in, scratch;
    for (int i = 0; i < 16; ++i) {
        if (!sampler.draw(rng, in)) continue;
        Complex r;
        prog.run(in.data(), &r, scratch);
        if (!(r.real() > 0)) fail("bright soliton needs a focusing nonlinearity");
    }
    Expr hbar = sym(hbar_symbol), a = sym("a"), v = sym("v"), q = sym(eq.var), t = sym(time_symbol);
    Expr k = hbar * v / (Expr(2) * c2);
    Expr omega = (c2 * k * k - c2 * a * a - C0) / hbar;
    SolutionFamily fam;
    fam.name = "bright-soliton";
    fam.var = eq.var;
    fam.amplitude = a * sqrt(Expr(2) * c2 / g) * sech(a * (q - v * t));
    fam.phase = k * q - omega * t;
    fam.psi = fam.amplitude * exp(I() * fam.phase);
    fam.parameters = {"a", "v"};
    fam.validity = "focusing nonlinearity";
    return fam;
}

ResidualReport residual_full(const Expr& Psi, const FullEquation& eq, const DifferentialOperator& laplacian,
                             const SamplingBox& box, int points, std::mt19937_64& rng) {
    Expr R = full_residual(eq, laplacian, Psi);
    GuardedSampler s({R}, box);
    Program prog({R}, s.symbols());
    ResidualReport rep;
    std::vector<Complex> in, scratch;
    double sum = 0.0;
    for (int p = 0; p < points; ++p) {
        if (!s.draw(rng, in)) continue;
        Complex v;
        prog.run(in.data(), &v, scratch);
        rep.max = std::max(rep.max, std::abs(v));
        sum += std::abs(v);
        ++rep.points;
    }
    rep.mean = rep.points ? sum / rep.points : 0.0;
    return rep;
}

namespace {

// Central differences of 4th order.
Complex d1(const std::function<Complex(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}
Complex d2(const std::function<Complex(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h);
}

}  // namespace

ResidualReport residual_full_lattice(const GroupFunction& Psi, const FullEquation& eq,
                                     const DifferentialOperator& laplacian, const Binding& params,
                                     const std::vector<std::vector<double>>& points, double h) {
    const auto& vars = laplacian.vars();
    std::size_t n = vars.size();
    bool td = eq.kind == EquationKind::TimeDependent;
    std::vector<Expr> coeffs;
    std::vector<MultiIndex> idx;
    for (const auto& [a, c] : laplacian.terms()) {
        idx.push_back(a);
        coeffs.push_back(c);
    }
    Expr hbar = sym(hbar_symbol);
    Expr pref = pow(hbar, Rational(2)) / (Expr(2) * sym(mass_symbol));
    std::vector<Expr> outs = coeffs;
    outs.push_back(eq.potential);
    outs.push_back(eq.coupling * eq.weight);
    outs.push_back(pref);
    outs.push_back(I() * hbar);
    outs.push_back(eq.kind == EquationKind::Stationary ? sym(energy_symbol) : Expr(0));
    Program prog(outs, [&] {
        std::vector<std::string> in = vars;
        for (const auto& [k, v] : params) in.push_back(k);
        return in;
    }());

    ResidualReport rep;
    rep.spacing = h;
    double sum = 0.0;
    std::vector<Complex> in(n + params.size()), out(outs.size()), scratch;
    for (const auto& pt : points) {
        std::vector<double> x(pt.begin(), pt.begin() + static_cast<std::ptrdiff_t>(n));
        double t = td ? pt.at(n) : 0.0;
        for (std::size_t i = 0; i < n; ++i) in[i] = x[i];
        std::size_t j = n;
        for (const auto& kv : params) in[j++] = kv.second;
        prog.run(in.data(), out.data(), scratch);

        auto along = [&](std::size_t i, std::vector<double> base) {
            return std::function<Complex(double)>([&Psi, i, base, t](double v) mutable {
                base[i] = v;
                return Psi(base, t);
            });
        };
        Complex lap = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            std::vector<std::size_t> ds;
            for (std::size_t i = 0; i < n; ++i)
                for (int r = 0; r < idx[k][i]; ++r) ds.push_back(i);
            Complex d;
            if (ds.empty()) {
                d = Psi(x, t);
            } else if (ds.size() == 1) {
                d = d1(along(ds[0], x), x[ds[0]], h);
            } else if (ds[0] == ds[1]) {
                d = d2(along(ds[0], x), x[ds[0]], h);
            } else {
                std::size_t a = ds[0], b = ds[1];
                auto inner = [&](double va) {
                    std::vector<double> y = x;
                    y[a] = va;
                    return d1(along(b, y), y[b], h);
                };
                d = d1(inner, x[a], h);
            }
            lap += out[k] * d;
        }
        Complex psi = Psi(x, t);
        std::size_t m = idx.size();
        Complex R = out[m + 2] * lap - out[m] * psi - out[m + 1] * std::norm(psi) * psi + out[m + 4] * psi;
        if (td) R += out[m + 3] * d1([&](double tt) { return Psi(x, tt); }, t, h);
        rep.max = std::max(rep.max, std::abs(R));
        sum += std::abs(R);
        ++rep.points;
    }
    rep.mean = rep.points ? sum / rep.points : 0.0;
    return rep;
}

double reduced_residual_on_span(const ReducedEquation& eq, const Expr& psi, const Binding& params, double lo,
                                double hi, int n, double t) {
    Binding b = params;
    b[time_symbol] = t;
    Function1 r(eq.residual(psi), eq.var, b);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(r(lo + (hi - lo) * k / std::max(1, n - 1))));
    return worst;
}

}  // namespace ncr
