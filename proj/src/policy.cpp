#include "drlqg/policy.hpp"

#include <sstream>

#include "drlqg/errors.hpp"

namespace drlqg {

LinearPolicy make_zero_policy(int horizon, int m, int p) {
  LinearPolicy policy;
  policy.horizon = horizon;
  policy.m = m;
  policy.p = p;
  policy.U = Eigen::MatrixXd::Zero(horizon * m, horizon * p);
  policy.q = Eigen::VectorXd::Zero(horizon * m);
  return policy;
}

LinearPolicy make_policy(int horizon, int m, int p, const Eigen::MatrixXd& U,
                         const Eigen::VectorXd& q) {
  LinearPolicy policy;
  policy.horizon = horizon;
  policy.m = m;
  policy.p = p;
  policy.U = U;
  policy.q = q;
  validate_policy(policy);
  return policy;
}

void validate_policy(const LinearPolicy& policy) {
  const int T = policy.horizon;
  if (T < 1 || policy.m < 1 || policy.p < 1)
    throw DimensionError("policy dimensions must be positive");
  if (policy.U.rows() != T * policy.m || policy.U.cols() != T * policy.p) {
    std::ostringstream os;
    os << "policy gain has shape " << policy.U.rows() << "x" << policy.U.cols()
       << ", expected " << T * policy.m << "x" << T * policy.p;
    throw DimensionError(os.str());
  }
  if (policy.q.size() != T * policy.m) {
    std::ostringstream os;
    os << "policy offset has length " << policy.q.size() << ", expected "
       << T * policy.m;
    throw DimensionError(os.str());
  }
  // Strict upper blocks must vanish: u_t may not see η_s for s > t.
  for (int t = 0; t < T; ++t) {
    for (int s = t + 1; s < T; ++s) {
      if (!policy.block(t, s).isZero(0.0)) {
        std::ostringstream os;
        os << "policy gain block (" << t << ", " << s
           << ") is nonzero; inputs cannot depend on future outputs";
        throw CausalityError(os.str(), t, s);
      }
    }
  }
}

}  // namespace drlqg
