#ifndef CCTUNNEL_ODEINT_HPP
#define CCTUNNEL_ODEINT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

// Adaptive explicit Runge-Kutta integrator of order 8 with an embedded
// 5th/3rd order error estimate (the Dormand-Prince 8(5,3) pair in Hairer's
// classic coefficient set). Works on complex state vectors, integrates in
// either direction, and honors a hard cap on the step size so the step
// controller can never leap over narrow potential structures.

namespace cctunnel {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.3;
  double initial_step = 0.0;  // 0 selects the step automatically
  long long max_evals = 50000000;
};

struct IntegrationReport {
  long long rhs_evals = 0;
  long long steps_accepted = 0;
  long long steps_rejected = 0;
  double last_step = 0.0;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace rk853 {

// Node, weight, and error coefficients of the 8(5,3) pair.
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

}  // namespace rk853

namespace detail {

inline double hairer_initial_step(double dnf, double dny, double der2, double hmax,
                                  double h_trial) {
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  double h1;
  if (der12 <= 1e-15) {
    h1 = std::max(1e-6, std::abs(h_trial) * 1e-3);
  } else {
    h1 = std::pow(0.01 / der12, 1.0 / 8.0);
  }
  (void)dny;
  return std::min({100.0 * std::abs(h_trial), h1, hmax});
}

}  // namespace detail

// Integrates dy/dx = rhs(x, y) from x_from to x_to (either direction) and
// returns y(x_to). rhs must have signature
//   void rhs(double x, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydx)
// with dydx preallocated to y.size().
template <class Rhs>
Eigen::VectorXcd integrate(Rhs&& rhs, double x_from, double x_to, Eigen::VectorXcd y,
                           const IntegratorConfig& cfg, IntegrationReport* report = nullptr) {
  using Vec = Eigen::VectorXcd;
  namespace T = rk853;

  if (x_from == x_to) throw std::invalid_argument("integration span is empty");
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
    throw std::invalid_argument("tolerances must be > 0");
  if (!(cfg.max_step > 0.0)) throw std::invalid_argument("max_step must be > 0");

  const Eigen::Index n = y.size();
  const double posneg = x_to > x_from ? 1.0 : -1.0;
  const double hmax = std::min(cfg.max_step, std::abs(x_to - x_from));
  const double uround = std::numeric_limits<double>::epsilon();
  const double safe = 0.9;
  const double expo1 = 1.0 / 8.0;
  const double facc1 = 3.0;        // max growth of 1/fac
  const double facc2 = 1.0 / 6.0;  // max shrink of 1/fac

  IntegrationReport rep;
  double x = x_from;
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), k9(n), k10(n), k11(n),
      k12(n), ksum(n), yt(n), ynew(n);

  auto eval = [&](double xx, const Vec& yy, Vec& out) {
    if (rep.rhs_evals >= cfg.max_evals)
      throw IntegrationError("rhs evaluation budget exhausted");
    rhs(xx, yy, out);
    ++rep.rhs_evals;
  };

  eval(x, y, k1);

  double h;
  if (cfg.initial_step > 0.0) {
    h = posneg * std::min(cfg.initial_step, hmax);
  } else {
    double dnf = 0.0, dny = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
      dnf += std::norm(k1[i] / sc);
      dny += std::norm(y[i] / sc);
    }
    double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h0 = std::min(h0, hmax);
    yt = y + posneg * h0 * k1;
    eval(x + posneg * h0, yt, k2);
    double der2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
      der2 += std::norm((k2[i] - k1[i]) / sc);
    }
    der2 = std::sqrt(der2) / h0;
    h = posneg * detail::hairer_initial_step(dnf, dny, der2, hmax, h0);
  }

  bool reject = false;
  bool last = false;
  double facold = 1e-4;

  while (true) {
    if (0.1 * std::abs(h) <= std::abs(x) * uround)
      throw IntegrationError("step size underflow");
    if ((x + 1.01 * h - x_to) * posneg > 0.0) {
      h = x_to - x;
      last = true;
    }

    yt = y + h * (T::a21 * k1);
    eval(x + T::c2 * h, yt, k2);
    yt = y + h * (T::a31 * k1 + T::a32 * k2);
    eval(x + T::c3 * h, yt, k3);
    yt = y + h * (T::a41 * k1 + T::a43 * k3);
    eval(x + T::c4 * h, yt, k4);
    yt = y + h * (T::a51 * k1 + T::a53 * k3 + T::a54 * k4);
    eval(x + T::c5 * h, yt, k5);
    yt = y + h * (T::a61 * k1 + T::a64 * k4 + T::a65 * k5);
    eval(x + T::c6 * h, yt, k6);
    yt = y + h * (T::a71 * k1 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
    eval(x + T::c7 * h, yt, k7);
    yt = y + h * (T::a81 * k1 + T::a84 * k4 + T::a85 * k5 + T::a86 * k6 + T::a87 * k7);
    eval(x + T::c8 * h, yt, k8);
    yt = y + h * (T::a91 * k1 + T::a94 * k4 + T::a95 * k5 + T::a96 * k6 + T::a97 * k7 +
                  T::a98 * k8);
    eval(x + T::c9 * h, yt, k9);
    yt = y + h * (T::a101 * k1 + T::a104 * k4 + T::a105 * k5 + T::a106 * k6 +
                  T::a107 * k7 + T::a108 * k8 + T::a109 * k9);
    eval(x + T::c10 * h, yt, k10);
    yt = y + h * (T::a111 * k1 + T::a114 * k4 + T::a115 * k5 + T::a116 * k6 +
                  T::a117 * k7 + T::a118 * k8 + T::a119 * k9 + T::a1110 * k10);
    eval(x + T::c11 * h, yt, k11);
    yt = y + h * (T::a121 * k1 + T::a124 * k4 + T::a125 * k5 + T::a126 * k6 +
                  T::a127 * k7 + T::a128 * k8 + T::a129 * k9 + T::a1210 * k10 +
                  T::a1211 * k11);
    eval(x + h, yt, k12);

    ksum = T::b1 * k1 + T::b6 * k6 + T::b7 * k7 + T::b8 * k8 + T::b9 * k9 +
           T::b10 * k10 + T::b11 * k11 + T::b12 * k12;
    ynew = y + h * ksum;

    // Hybrid error estimate: 5th order damped by the 3rd order one.
    double err3 = 0.0, err5 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const std::complex<double> e3 =
          ksum[i] - T::bhh1 * k1[i] - T::bhh2 * k9[i] - T::bhh3 * k12[i];
      const std::complex<double> e5 = T::er1 * k1[i] + T::er6 * k6[i] + T::er7 * k7[i] +
                                      T::er8 * k8[i] + T::er9 * k9[i] + T::er10 * k10[i] +
                                      T::er11 * k11[i] + T::er12 * k12[i];
      err3 += std::norm(e3 / sc);
      err5 += std::norm(e5 / sc);
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    const double err = std::abs(h) * err5 * std::sqrt(1.0 / (static_cast<double>(n) * deno));

    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      ++rep.steps_accepted;
      x += h;
      y.swap(ynew);
      rep.last_step = h;
      if (last) break;
      eval(x, y, k1);
      double fac = fac11 / safe;
      fac = std::max(facc2, std::min(facc1, fac));
      double hnew = h / fac;
      if (reject) hnew = posneg * std::min(std::abs(hnew), std::abs(h));
      if (std::abs(hnew) > hmax) hnew = posneg * hmax;
      h = hnew;
      reject = false;
    } else {
      h = h / std::min(facc1, fac11 / safe);
      reject = true;
      last = false;
      if (rep.steps_accepted >= 1) ++rep.steps_rejected;
    }
  }

  (void)facold;
  if (report) *report = rep;
  return y;
}

}  // namespace cctunnel

#endif
