// Minimal end-to-end use: build an NMF instance, fit its reference, run ARM.

#include <iostream>

#include "sconcord/sconcord.hpp"

int main() {
    using namespace sconcord;
    const problems::NmfInstance inst = problems::make_nmf_mse(20, 10, 5, /*seed=*/7);
    const ReferencePair pair = problems::nmf_oracles(inst);
    const Vector x0 = problems::nmf_initial_point(inst, 1);

    ArmConfig cfg;  // sigma0 = 1, eta = (0.01, 0.9), gamma = (0.5, 2, 2)
    cfg.option = ArmOption::newton;
    cfg.eps = 1e-7;
    const SolveReport rep = arm_solve(pair, x0, cfg);

    const double f = pair.objective.value(rep.final_point).value();
    std::cout << "status " << to_string(rep.status) << " after " << rep.iterations << " iterations\n"
              << "f " << f << ", gap " << f - *inst.optimal_value_hint << ", nu " << rep.final_nu << "\n";
    return rep.status == SolveStatus::converged ? 0 : 1;
}
