#pragma once

#include <json.hpp>
#include <string>

namespace cotlift {

using Json = nlohmann::ordered_json;

// Machine-readable command report. Insertion order is preserved and no
// timestamps are recorded, so identical inputs produce byte-identical
// bodies. Every numeric entry lands in `checks` with the name of the check
// that produced it.
class Report {
public:
    explicit Report(std::string command);

    Json& config() { return root_["config"]; }
    Json& verdicts() { return root_["verdicts"]; }
    Json& extra() { return root_["data"]; }

    void add_check(const std::string& name, double residual, double tol, bool pass,
                   const std::string& provenance);
    void add_note(const std::string& name, const std::string& text);

    bool all_passed() const { return all_passed_; }
    void mark_failed() { all_passed_ = false; }

    std::string to_json() const;
    std::string to_text() const;

private:
    Json root_;
    bool all_passed_ = true;
};

}  // namespace cotlift
