// Prints the optimal LP impact curve for a few Hurst exponents and the
// fitted log-log slope of each.

#include <autoliq/kelly_impact.hpp>
#include <autoliq/numeric.hpp>

#include <cstdio>

int main() {
    const auto sizes = autoliq::numeric::log_grid(0.01, 1e4, 25);
    for (double h : {0.3, 0.5, 0.7, 0.75}) {
        const autoliq::GrowthModel model{1.0, 1.0, 1.0, h};
        const auto curve = autoliq::impact_curve(sizes, model);
        std::printf("H=%.2f  dP(1)=%.6f  dP(100)=%.6f  slope=%.6f (model %.2f)\n", h,
                    autoliq::optimal_impact_fou(1.0, model), autoliq::optimal_impact_fou(100.0, model),
                    autoliq::impact_exponent(curve), model.impact_exponent());
    }
}
