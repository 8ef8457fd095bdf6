#pragma once

#include <stdexcept>
#include <string>

namespace spinlab {

// Precondition / domain violations (CLI maps these to exit code 2).
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Iteration / sample / memory budgets exhausted (CLI exit code 3).
struct budget_error : std::runtime_error {
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinlab
