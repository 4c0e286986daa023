#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mbt/serialize.hpp"

namespace mbt {

struct Response {
    bool ok = true;
    std::string error;  // set when !ok
    std::map<std::string, std::string> fields;

    friend bool operator==(const Response&, const Response&) = default;
};

/// One isolated conversation with the system under test. Commands apply in
/// call order.
class Session {
public:
    virtual ~Session() = default;
    virtual Response apply(const std::string& command, const std::map<std::string, std::string>& args) = 0;
};

class Driver {
public:
    virtual ~Driver() = default;
    /// Must be safe to call from several threads at once. Throws SessionError.
    virtual std::unique_ptr<Session> start_session(const json& config) = 0;
    virtual void end_session(Session&) {}
};

using DriverFactory = std::function<std::unique_ptr<Driver>()>;

class DriverRegistry {
public:
    /// Registry with the built-in "refsut" driver.
    static DriverRegistry& standard();

    void add(std::string name, DriverFactory factory);
    /// Throws DriverUnavailable.
    std::unique_ptr<Driver> make(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, DriverFactory> factories_;
};

}  // namespace mbt
