#include "cotlift/report.hpp"

#include <sstream>

namespace cotlift {

Report::Report(std::string command) {
    root_["command"] = std::move(command);
    root_["config"] = Json::object();
    root_["checks"] = Json::array();
    root_["verdicts"] = Json::object();
    root_["data"] = Json::object();
}

void Report::add_check(const std::string& name, double residual, double tol, bool pass,
                       const std::string& provenance) {
    Json check;
    check["name"] = name;
    check["residual"] = residual;
    check["tol"] = tol;
    check["pass"] = pass;
    check["provenance"] = provenance;
    root_["checks"].push_back(std::move(check));
    all_passed_ = all_passed_ && pass;
}

void Report::add_note(const std::string& name, const std::string& text) {
    root_["data"][name] = text;
}

std::string Report::to_json() const {
    Json out = root_;
    out["pass"] = all_passed_;
    return out.dump(2) + "\n";
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "== " << root_["command"].get<std::string>() << " ==\n";
    if (!root_["config"].empty()) {
        os << "config:\n";
        for (auto it = root_["config"].begin(); it != root_["config"].end(); ++it)
            os << "  " << it.key() << " = " << it.value().dump() << "\n";
    }
    for (const auto& check : root_["checks"]) {
        os << (check["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << std::scientific;
        os.precision(3);
        os << check["name"].get<std::string>() << "  residual=" << check["residual"].get<double>()
           << "  tol=" << check["tol"].get<double>() << "  (" << std::defaultfloat
           << check["provenance"].get<std::string>() << ")\n";
    }
    if (!root_["verdicts"].empty()) {
        os << "verdicts:\n";
        for (auto it = root_["verdicts"].begin(); it != root_["verdicts"].end(); ++it)
            os << "  " << it.key() << " = " << it.value().dump() << "\n";
    }
    if (!root_["data"].empty()) {
        for (auto it = root_["data"].begin(); it != root_["data"].end(); ++it)
            os << it.key() << ": " << it.value().dump() << "\n";
    }
    os << (all_passed_ ? "overall: PASS" : "overall: FAIL") << "\n";
    return os.str();
}

}  // namespace cotlift
