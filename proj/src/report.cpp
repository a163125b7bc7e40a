#include "gridqr/report.hpp"

#include <sstream>

#include <json.hpp>

namespace gridqr {

namespace {
nlohmann::json triple_json(const CostTriple& t) {
  return {{"alpha", t.alpha.to_double()},
          {"beta", t.beta.to_double()},
          {"gamma", t.gamma.to_double()}};
}
}  // namespace

std::string RunReport::to_json() const {
  nlohmann::json j{{"algorithm", algorithm},
                   {"m", m},
                   {"n", n},
                   {"c", c},
                   {"d", d},
                   {"n_o", n_o},
                   {"variant", variant},
                   {"seed", seed},
                   {"cond", cond},
                   {"orthogonality_error", orthogonality_error},
                   {"residual", residual},
                   {"ledger", triple_json(ledger)},
                   {"analytic", triple_json(analytic)},
                   {"match", match},
                   {"wall_time_ms", wall_time_ms}};
  return j.dump(2);
}

std::string RunReport::csv_header() {
  return "algorithm,m,n,c,d,n_o,variant,seed,cond,orthogonality_error,residual,"
         "ledger_alpha,ledger_beta,ledger_gamma,"
         "analytic_alpha,analytic_beta,analytic_gamma,match,wall_time_ms";
}

std::string RunReport::to_csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << algorithm << ',' << m << ',' << n << ',' << c << ',' << d << ',' << n_o << ','
     << variant << ',' << seed << ',' << cond << ',' << orthogonality_error << ','
     << residual << ',' << ledger.alpha.to_double() << ',' << ledger.beta.to_double()
     << ',' << ledger.gamma.to_double() << ',' << analytic.alpha.to_double() << ','
     << analytic.beta.to_double() << ',' << analytic.gamma.to_double() << ','
     << (match ? "true" : "false") << ',' << wall_time_ms;
  return os.str();
}

}  // namespace gridqr
