#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbt {

/// Root of every error the toolchain throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- expression language ---------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
        : Error(what), offset_(offset), expected_(std::move(expected)) {}
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class TypeError : public Error {
public:
    TypeError(std::string subexpr, const std::string& what)
        : Error(what), subexpr_(std::move(subexpr)) {}
    /// Pretty-printed offending subexpression.
    const std::string& subexpr() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class ActionError : public Error {
public:
    ActionError(std::size_t index, const std::string& what) : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// --- efsm core -------------------------------------------------------------

class ModelError : public Error {
public:
    using Error::Error;
};

class UnknownState : public Error {
public:
    explicit UnknownState(const std::string& label)
        : Error("unknown state '" + label + "'"), label_(label) {}
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

class GuardTypeError : public Error {
public:
    using Error::Error;
};

class GuardViolation : public Error {
public:
    using Error::Error;
};

// --- model io --------------------------------------------------------------

class ParseError : public Error {
public:
    ParseError(std::string element, const std::string& what)
        : Error(what), element_(std::move(element)) {}
    const std::string& element() const noexcept { return element_; }

private:
    std::string element_;
};

class LabelGrammarError : public Error {
public:
    LabelGrammarError(std::string label, const std::string& what)
        : Error(what), label_(std::move(label)) {}
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

class DslSyntaxError : public Error {
public:
    DslSyntaxError(std::size_t line, std::size_t column, const std::string& msg)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class CycleError : public Error {
public:
    using Error::Error;
};

class NoExitError : public Error {
public:
    using Error::Error;
};

// --- generator -------------------------------------------------------------

class BudgetExhausted : public Error {
public:
    BudgetExhausted(std::vector<std::string> uncovered, const std::string& what)
        : Error(what), uncovered_(std::move(uncovered)) {}
    const std::vector<std::string>& uncovered() const noexcept { return uncovered_; }

private:
    std::vector<std::string> uncovered_;
};

class GuardTrap : public Error {
public:
    using Error::Error;
};

class DeadEnd : public Error {
public:
    DeadEnd(std::string state, std::vector<std::string> guardValues)
        : Error("dead end at '" + state + "'"), state_(std::move(state)),
          guardValues_(std::move(guardValues)) {}
    const std::string& state() const noexcept { return state_; }
    /// One "label [guard] = value" line per outgoing transition.
    const std::vector<std::string>& guardValues() const noexcept { return guardValues_; }

private:
    std::string state_;
    std::vector<std::string> guardValues_;
};

class UnknownLabel : public Error {
public:
    using Error::Error;
};

// --- mapping ---------------------------------------------------------------

class TableError : public Error {
public:
    using Error::Error;
};

class MissingLabel : public Error {
public:
    MissingLabel(std::string label, std::string group)
        : Error("no mapping entry for '" + label + "' (group '" + group + "')"),
          label_(std::move(label)), group_(std::move(group)) {}
    const std::string& label() const noexcept { return label_; }
    const std::string& group() const noexcept { return group_; }

private:
    std::string label_;
    std::string group_;
};

class UnresolvedPlaceholder : public Error {
public:
    UnresolvedPlaceholder(std::string name, std::string label)
        : Error("unresolved placeholder '{{" + name + "}}' in '" + label + "'"),
          name_(std::move(name)), label_(std::move(label)) {}
    const std::string& name() const noexcept { return name_; }
    const std::string& label() const noexcept { return label_; }

private:
    std::string name_;
    std::string label_;
};

class TodoFragment : public Error {
public:
    explicit TodoFragment(std::string label)
        : Error("mapping entry for '" + label + "' is still a TODO template"),
          label_(std::move(label)) {}
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

class HashMismatch : public Error {
public:
    using Error::Error;
};

// --- runner / sut ----------------------------------------------------------

class DriverUnavailable : public Error {
public:
    using Error::Error;
};

class SessionError : public Error {
public:
    using Error::Error;
};

class NoMatchingUser : public Error {
public:
    using Error::Error;
};

class StoreParseError : public Error {
public:
    using Error::Error;
};

}  // namespace mbt
