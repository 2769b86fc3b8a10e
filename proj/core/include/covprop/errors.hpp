/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace covprop {

/// A violated mathematical precondition or axiom. `name()` is the stable
/// identifier reported by the CLI (e.g. "LeftInvarianceViolated"); `witness()`
/// carries the offending element indices, when there are any.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string name, const std::string& message, std::vector<std::size_t> witness = {})
      : std::runtime_error(name + ": " + message), name_(std::move(name)), witness_(std::move(witness)) {}

  const std::string& name() const { return name_; }
  const std::vector<std::size_t>& witness() const { return witness_; }

 private:
  std::string name_;
  std::vector<std::size_t> witness_;
};

/// Malformed input: bad JSON, missing fields, wrong shapes, unknown names.
/// `locus()` names the file/field where the problem was found.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message, std::string locus = {})
      : std::runtime_error(locus.empty() ? message : locus + ": " + message), locus_(std::move(locus)) {}

  const std::string& locus() const { return locus_; }

 private:
  std::string locus_;
};

}  // namespace covprop
