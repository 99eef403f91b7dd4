#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cotlift/action.hpp"
#include "cotlift/chart.hpp"
#include "cotlift/parse.hpp"

namespace cotlift {

// Text system-definition format (full grammar in docs/format.md):
//
//   chart {
//     positions: x1 x2
//     momenta:   y1 y2        # optional, default p_<position>
//     periodic:  x1           # optional subset of positions
//   }
//   function f1 = (x1^2 + y1^2)^2
//   action rot {
//     group: circle theta     # circle|torus|lines; repeat for products
//     base: q
//     periodic: q             # optional
//     map: q + theta          # one per base variable, in order
//   }
//   experiment main {
//     command: analyze
//     tol: 1e-9
//   }
//
// '#' starts a comment. Parse and validation errors carry line/column.
struct ExperimentConfig {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
};

struct SystemFile {
    std::optional<DarbouxChart> chart;
    std::vector<std::pair<std::string, Expr>> functions;
    std::vector<std::pair<std::string, ActionSpec>> actions;
    std::vector<ExperimentConfig> experiments;

    const Expr* find_function(const std::string& name) const;
    const ActionSpec* find_action(const std::string& name) const;
    // The chart plus all functions, in file order.
    MomentMapSystem system() const;
};

SystemFile parse_system_file(const std::string& text);
SystemFile load_system_file(const std::string& path);

}  // namespace cotlift
