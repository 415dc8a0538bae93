// Walks the four-stage pool cycle on a 100/100 pool and prints each ledger.

#include <autoliq/carnot_cycle.hpp>

#include <cstdio>

int main() {
    const autoliq::CycleConfig config{};
    const auto report = autoliq::run_cycle(config);
    std::printf("%-7s %12s %12s %10s %10s %10s %10s\n", "stage", "pool_x", "pool_y", "in_x", "in_y", "out_x",
                "out_y");
    for (const auto& s : report.snapshots)
        std::printf("%-7s %12.6f %12.6f %10.4f %10.4f %10.4f %10.4f\n", autoliq::to_string(s.stage()),
                    s.pool().reserve_x(), s.pool().reserve_y(), s.inside().x, s.inside().y, s.outside().x,
                    s.outside().y);
    std::printf("removal G=%.9f H=%.9f\nwork analogue %.9f, gross short exposure %.6f\n", report.removal.x,
                report.removal.y, report.work_analogue, report.gross_short_exposure);
}
