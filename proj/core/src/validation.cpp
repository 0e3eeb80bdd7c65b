#include "dichotomy/validation.hpp"

#include <algorithm>
#include <stdexcept>

namespace dichotomy {

bool ValidationReport::pass() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* ValidationReport::find(const std::string& name) const noexcept {
    auto it = std::find_if(checks.begin(), checks.end(), [&](const CheckResult& c) { return c.name == name; });
    return it == checks.end() ? nullptr : &*it;
}

const CheckResult& ValidationReport::at(const std::string& name) const {
    if (const auto* c = find(name)) return *c;
    throw std::out_of_range("no check named '" + name + "'");
}

CheckResult& ValidationReport::add(std::string name, bool pass, double worst, double limit, std::string detail) {
    checks.push_back(CheckResult{std::move(name), pass, worst, limit, std::move(detail)});
    return checks.back();
}

}  // namespace dichotomy
