#include "tsce/rules.hpp"

#include "tsce/error.hpp"

#include <cmath>

namespace tsce {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

void check_alpha(double alpha) {
    if (alpha == 0.0 || !std::isfinite(alpha)) {
        throw Error(ErrorCode::invalid_argument, "edge weight must be finite and non-zero");
    }
}

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

ERTriple eval_er_continuous(const CausalScenario& c) {
    check_alpha(c.alpha);
    int sx = sign(c.x - c.phi_x);
    int sy = sign(c.y - c.phi_y);
    if (sx == 0 || sy == 0) return {};
    if (sign(c.alpha) * sx == sy) return {sx, 0, 0};
    return {0, sx, 0};
}

ERTriple eval_er_binary(double alpha, double x, double y) {
    check_alpha(alpha);
    if (!is_binary(x) || !is_binary(y)) {
        throw Error(ErrorCode::invalid_argument, "binary rule needs 0/1 values");
    }
    bool xs = x == 1.0, ys = y == 1.0;
    bool fires = (alpha < 0.0 && (xs != ys)) || (alpha > 0.0 && xs == ys);
    int side = xs ? 1 : -1;
    return fires ? ERTriple{side, 0, 0} : ERTriple{0, side, 0};
}

ERTriple eval_er_score(double alpha) {
    check_alpha(alpha);
    return {sign(alpha), 0, 0};
}

void apply_er3(std::vector<Er3Candidate>& siblings) {
    Er3Candidate* best = nullptr;
    double best_score = 0.0;
    int because = 0;
    for (Er3Candidate& c : siblings) {
        c.er.er3 = 0;
        if (c.er.er1 == 0) continue;
        ++because;
        double score = std::abs(c.alpha * (c.phi_x ? c.x - *c.phi_x : 1.0));
        bool better = !best || score > best_score ||
                      (score == best_score && (c.var < best->var || (c.var == best->var && c.t < best->t)));
        if (better) {
            best = &c;
            best_score = score;
        }
    }
    if (because >= 2) best->er.er3 = 1;
}

}  // namespace tsce
