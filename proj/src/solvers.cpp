#include "lossav/solvers.hpp"

namespace lossav {

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("bisect: tol must be > 0");
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(flo * fhi < 0.0))
        throw BracketError("bisect: no sign change on [" + format_double(lo) + ", " +
                           format_double(hi) + "]");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace lossav
