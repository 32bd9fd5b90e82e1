#include "lossav/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <string>

namespace lossav {

namespace detail {
void non_finite(const char* where, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << where << ": non-finite integrand at eps=" << a << ", logy=" << b;
    throw NumericalError(os.str());
}
}  // namespace detail

namespace {

// orthonormal probabilists' Hermite values psi_{n-1}(x), psi_n(x)
void hermite_pair(int n, double x, double& pnm1, double& pn) {
    double p0 = 1.0, p1 = x;
    if (n == 1) {
        pnm1 = p0;
        pn = p1;
        return;
    }
    for (int k = 1; k < n; ++k) {
        double p2 = (x * p1 - std::sqrt(static_cast<double>(k)) * p0) / std::sqrt(k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    pnm1 = p0;
    pn = p1;
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
    if (order < 1 || order > 200)
        throw ArgumentError("gauss_hermite: order must be in [1,200], got " + std::to_string(order));
    QuadratureRule r;
    r.order = order;
    if (order == 1) {
        r.nodes = {0.0};
        r.weights = {1.0};
        return r;
    }
    const int n = order;
    // Jacobi matrix of the probabilists' Hermite recurrence
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    std::vector<double> x(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(x.begin(), x.end());

    // Newton polish, then weights from the Christoffel formula
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        double pnm1 = 0, pn = 0;
        for (int it = 0; it < 10; ++it) {
            hermite_pair(n, x[i], pnm1, pn);
            double dx = pn / (std::sqrt(static_cast<double>(n)) * pnm1);
            x[i] -= dx;
            if (std::fabs(dx) < 1e-16 * std::max(1.0, std::fabs(x[i]))) break;
        }
        hermite_pair(n, x[i], pnm1, pn);
        w[i] = 1.0 / (n * pnm1 * pnm1);
    }
    // exact symmetry
    for (int i = 0; i < n / 2; ++i) {
        double xs = 0.5 * (x[n - 1 - i] - x[i]);
        double ws = 0.5 * (w[i] + w[n - 1 - i]);
        x[i] = -xs;
        x[n - 1 - i] = xs;
        w[i] = w[n - 1 - i] = ws;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    r.nodes = std::move(x);
    r.weights = std::move(w);
    return r;
}

}  // namespace lossav
