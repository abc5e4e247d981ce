#include "fpplocal/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

namespace fpplocal::stats {

double chi_square_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must be in (0,1)");
    boost::math::chi_squared dist(dof);
    return boost::math::quantile(dist, p);
}

} // namespace fpplocal::stats
