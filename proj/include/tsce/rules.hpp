#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tsce {

/// (ER1, ER2, ER3). ER1/ER2 are -1, 0 or +1 and encode the parent's side
/// (+1 high / active, -1 low / inactive). At most one of them is non-zero.
struct ERTriple {
    int er1 = 0;
    int er2 = 0;
    int er3 = 0;

    bool empty() const { return er1 == 0 && er2 == 0 && er3 == 0; }
    friend auto operator<=>(const ERTriple&, const ERTriple&) = default;
};

/// Edge X -> Y with the parent value x and child value y and their
/// population statistics.
struct CausalScenario {
    double alpha = 0.0;
    double x = 0.0;
    double y = 0.0;
    double phi_x = 0.0;
    double phi_y = 0.0;
};

/// "because" when the parent's deviation, pushed through sign(alpha), points
/// the same way as the child's deviation; "although" when it points the other
/// way. x == phi_x or y == phi_y gives (0,0,0).
ERTriple eval_er_continuous(const CausalScenario& scenario);

/// Binary behaviour rule: fires iff (alpha < 0 and x xor y) or
/// (alpha > 0 and x == y). Non-firing parents are kept as "although".
ERTriple eval_er_binary(double alpha, double x, double y);

/// Sign-only indicator for continuous behaviour variables such as the score.
ERTriple eval_er_score(double alpha);

struct Er3Candidate {
    std::string var;
    int t = 0;
    ERTriple er;
    double alpha = 0.0;
    double x = 0.0;
    std::optional<double> phi_x;  ///< absent for binary / behaviour variables
};

/// Marks the single because-sibling with the largest |alpha * (x - phi_x)|
/// (|alpha| without a statistic). Needs at least two because-siblings; ties go
/// to the smaller name, then the earlier time. Any previous marks are cleared.
void apply_er3(std::vector<Er3Candidate>& siblings);

}  // namespace tsce
