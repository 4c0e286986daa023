#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbt/driver.hpp"

namespace mbt {

// --- test data store -------------------------------------------------------

enum class Maturity { New, Intermediate, Advanced };

std::string_view to_string(Maturity m);
Maturity maturity_from_string(std::string_view s);

struct User {
    std::string email;
    std::string password;
    std::string name;
    std::string title;
    std::string country;
    Maturity maturity = Maturity::New;

    friend bool operator==(const User&, const User&) = default;
};

/// JSON array of users. Throws StoreParseError (also on duplicate emails).
std::vector<User> parse_qtds(std::string_view text);
std::vector<User> load_qtds(const std::filesystem::path& path);

/// Round-robin over the users matching `filter`; advances `cursor`.
/// Throws NoMatchingUser.
const User& qtds_get_user(const std::vector<User>& store, std::optional<Maturity> filter, std::size_t& cursor);
User qtds_get_user(const std::filesystem::path& store, std::optional<Maturity> filter, std::size_t& cursor);

// --- quiz app --------------------------------------------------------------

enum class Scene { Welcome, EmailLogin, EmailSignup, Home, Topics, History, Messages, Settings, Profile, GamePlay, GameStats };

std::string_view scene_name(Scene s);
std::string_view scene_header(Scene s);
std::optional<Scene> scene_from_name(std::string_view name);

enum class Fault { NameNotPropagated, WrongSettingsTab, StaleHistory, WrongHeader, NoLogoutCleanup, WrongLoginError };
using FaultSet = std::set<Fault>;

/// "FAULT_WRONG_HEADER" etc.
std::string_view to_string(Fault f);
Fault fault_from_string(std::string_view s);
const std::vector<Fault>& all_faults();

struct GameRecord {
    std::string topic;
    std::string opponent;
    std::string result;

    friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

struct AppState {
    Scene scene = Scene::Welcome;
    bool profileTab = false;  // Settings tab
    bool sidebarOpen = false;
    std::optional<User> user;
    std::string loginName;
    std::vector<Scene> sceneHistory;
    std::vector<GameRecord> gameRecords;
    std::map<std::string, std::vector<std::string>> messageLog;
    bool pendingIntro = false;

    std::string typedEmail;
    std::string typedPassword;
    std::string errorKind = "none";
    std::optional<std::string> chatWith;

    Scene gameOrigin = Scene::Home;
    std::string gameTopic;
    std::string gameOpponent;
    std::string gameOutcome;
    std::string lastResult;

    /// Known accounts: the test data store plus in-session sign-ups.
    std::vector<User> accounts;

    friend bool operator==(const AppState&, const AppState&) = default;
};

inline constexpr const char* kOpponent = "Ada";

AppState initial_state(std::vector<User> accounts);
AppState logged_in_state(std::vector<User> accounts, const User& user);

/// The response fields for the current state.
std::map<std::string, std::string> render(const AppState& state, const FaultSet& faults);

struct Handled {
    AppState state;
    Response response;
};

/// Pure transition function. Unknown or inapplicable commands return an
/// error response and the unchanged state.
Handled handle(const AppState& state, const std::string& command, const std::map<std::string, std::string>& args,
               const FaultSet& faults);

/// Driver over in-process sessions. Config: {baseState: "Welcome"|"Home",
/// faults: [...], qtdsPath, maturity?, profile?}.
std::unique_ptr<Driver> make_refsut_driver();

}  // namespace mbt
