#include <algorithm>
#include <fstream>
#include <sstream>

#include "mbt/refsut.hpp"

namespace mbt {

std::string_view to_string(Maturity m) {
    switch (m) {
        case Maturity::New: return "new";
        case Maturity::Intermediate: return "intermediate";
        case Maturity::Advanced: return "advanced";
    }
    return "?";
}

Maturity maturity_from_string(std::string_view s) {
    if (s == "new") return Maturity::New;
    if (s == "intermediate") return Maturity::Intermediate;
    if (s == "advanced") return Maturity::Advanced;
    throw Error("unknown maturity '" + std::string(s) + "'");
}

std::vector<User> parse_qtds(std::string_view text) {
    std::vector<User> out;
    try {
        json j = json::parse(text);
        if (!j.is_array()) throw StoreParseError("test data store must be a JSON array of users");
        std::set<std::string> emails;
        for (const auto& u : j) {
            User user{u.at("email").get<std::string>(),   u.at("password").get<std::string>(),
                      u.at("name").get<std::string>(),    u.value("title", ""),
                      u.value("country", ""),             maturity_from_string(u.at("maturity").get<std::string>())};
            if (!emails.insert(user.email).second) throw StoreParseError("duplicate email '" + user.email + "'");
            out.push_back(std::move(user));
        }
    } catch (const json::exception& e) {
        throw StoreParseError(std::string("malformed test data store: ") + e.what());
    } catch (const StoreParseError&) {
        throw;
    } catch (const Error& e) {
        throw StoreParseError(e.what());
    }
    return out;
}

std::vector<User> load_qtds(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreParseError("cannot read test data store '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_qtds(ss.str());
}

const User& qtds_get_user(const std::vector<User>& store, std::optional<Maturity> filter, std::size_t& cursor) {
    std::vector<const User*> matching;
    for (const auto& u : store)
        if (!filter || u.maturity == *filter) matching.push_back(&u);
    if (matching.empty())
        throw NoMatchingUser("no user with maturity '" + std::string(filter ? to_string(*filter) : "any") + "'");
    return *matching[cursor++ % matching.size()];
}

User qtds_get_user(const std::filesystem::path& store, std::optional<Maturity> filter, std::size_t& cursor) {
    auto users = load_qtds(store);
    return qtds_get_user(users, filter, cursor);
}

// --- scenes and faults -----------------------------------------------------

namespace {

struct SceneInfo {
    Scene scene;
    const char* name;
    const char* header;
};

constexpr SceneInfo kScenes[] = {
    {Scene::Welcome, "Welcome", "Welcome"},        {Scene::EmailLogin, "EmailLogin", "Email Log-in"},
    {Scene::EmailSignup, "EmailSignup", "Email Sign-up"}, {Scene::Home, "Home", "Home"},
    {Scene::Topics, "Topics", "Topics"},           {Scene::History, "History", "History"},
    {Scene::Messages, "Messages", "Messages"},     {Scene::Settings, "Settings", "Settings"},
    {Scene::Profile, "Profile", "Profile"},        {Scene::GamePlay, "GamePlay", "Game"},
    {Scene::GameStats, "GameStats", "Game Stats"},
};

const SceneInfo& info(Scene s) {
    return kScenes[static_cast<int>(s)];
}

struct FaultInfo {
    Fault fault;
    const char* name;
};

constexpr FaultInfo kFaults[] = {
    {Fault::NameNotPropagated, "FAULT_NAME_NOT_PROPAGATED"}, {Fault::WrongSettingsTab, "FAULT_WRONG_SETTINGS_TAB"},
    {Fault::StaleHistory, "FAULT_STALE_HISTORY"},            {Fault::WrongHeader, "FAULT_WRONG_HEADER"},
    {Fault::NoLogoutCleanup, "FAULT_NO_LOGOUT_CLEANUP"},     {Fault::WrongLoginError, "FAULT_WRONG_LOGIN_ERROR"},
};

}  // namespace

std::string_view scene_name(Scene s) {
    return info(s).name;
}

std::string_view scene_header(Scene s) {
    return info(s).header;
}

std::optional<Scene> scene_from_name(std::string_view name) {
    for (const auto& i : kScenes)
        if (name == i.name) return i.scene;
    return std::nullopt;
}

std::string_view to_string(Fault f) {
    return kFaults[static_cast<int>(f)].name;
}

Fault fault_from_string(std::string_view s) {
    for (const auto& f : kFaults)
        if (s == f.name || s == std::string_view(f.name).substr(6)) return f.fault;
    throw Error("unknown fault '" + std::string(s) + "'");
}

const std::vector<Fault>& all_faults() {
    static const std::vector<Fault> all = [] {
        std::vector<Fault> v;
        for (const auto& f : kFaults) v.push_back(f.fault);
        return v;
    }();
    return all;
}

// --- state machine ---------------------------------------------------------

AppState initial_state(std::vector<User> accounts) {
    AppState s;
    s.accounts = std::move(accounts);
    return s;
}

namespace {

bool has(const AppState& s, Scene scene) {
    return s.scene == scene;
}

bool is_main_scene(Scene s) {
    switch (s) {
        case Scene::Home:
        case Scene::Topics:
        case Scene::History:
        case Scene::Messages:
        case Scene::Settings:
        case Scene::Profile: return true;
        default: return false;
    }
}

void enter(AppState& s, Scene target) {
    if (target == Scene::Settings) s.profileTab = s.scene == Scene::Profile;
    s.scene = target;
    s.sceneHistory.push_back(target);
}

void log_in(AppState& s, const User& u) {
    s.user = u;
    s.loginName = u.name;
    s.pendingIntro = u.maturity == Maturity::New;
    s.typedEmail.clear();
    s.typedPassword.clear();
    s.errorKind = "none";
    s.sidebarOpen = false;
    s.scene = Scene::Home;
    s.sceneHistory = {Scene::Home};
}

bool well_formed_email(const std::string& e) {
    auto at = e.find('@');
    if (at == std::string::npos || at == 0 || e.find('@', at + 1) != std::string::npos) return false;
    if (e.find(' ') != std::string::npos) return false;
    auto dot = e.find('.', at + 2);
    return dot != std::string::npos && dot + 1 < e.size();
}

const User* find_account(const AppState& s, const std::string& email) {
    for (const auto& u : s.accounts)
        if (u.email == email) return &u;
    return nullptr;
}

}  // namespace

AppState logged_in_state(std::vector<User> accounts, const User& user) {
    AppState s = initial_state(std::move(accounts));
    log_in(s, user);
    return s;
}

std::map<std::string, std::string> render(const AppState& s, const FaultSet& faults) {
    auto on = [&](Fault f) { return faults.count(f) > 0; };
    std::map<std::string, std::string> f;
    f["header"] = std::string(scene_header(s.scene));
    if (s.scene == Scene::Settings && on(Fault::WrongHeader)) f["header"] = std::string(scene_header(Scene::Home));
    std::string name = s.user ? s.user->name : "";
    if (s.sidebarOpen) {
        f["sidebar"] = "open";
        f["sidebarName"] = on(Fault::NameNotPropagated) ? s.loginName : name;
    }
    auto chat = [&] {
        if (!s.chatWith) return;
        f["chatWith"] = *s.chatWith;
        auto it = s.messageLog.find(*s.chatWith);
        f["messageCount"] = std::to_string(it == s.messageLog.end() ? 0 : it->second.size());
    };
    auto intro = s.pendingIntro ? "true" : "false";
    switch (s.scene) {
        case Scene::EmailLogin:
        case Scene::EmailSignup:
            f["errorKind"] = s.errorKind;
            if (s.errorKind == "unknown_user" && on(Fault::WrongLoginError)) f["errorKind"] = "wrong_password";
            break;
        case Scene::Home:
        case Scene::Profile: f["displayName"] = name; break;
        case Scene::History: {
            std::size_t n = s.gameRecords.size();
            if (on(Fault::StaleHistory) && n > 0) --n;
            f["historyCount"] = std::to_string(n);
            f["intro"] = intro;
            break;
        }
        case Scene::Messages:
            f["intro"] = intro;
            chat();
            break;
        case Scene::Settings:
            f["tab"] = s.profileTab && !on(Fault::WrongSettingsTab) ? "profile" : "settings";
            f["displayName"] = name;
            break;
        case Scene::GamePlay:
            f["topic"] = s.gameTopic;
            f["opponent"] = s.gameOpponent;
            break;
        case Scene::GameStats:
            f["topic"] = s.gameTopic;
            f["result"] = s.lastResult;
            chat();
            break;
        default: break;
    }
    return f;
}

Handled handle(const AppState& state, const std::string& cmd, const std::map<std::string, std::string>& args,
               const FaultSet& faults) {
    AppState s = state;
    auto arg = [&](const char* k) -> std::optional<std::string> {
        auto it = args.find(k);
        if (it == args.end()) return std::nullopt;
        return it->second;
    };
    auto invalid = [&](const std::string& why = "") {
        std::string msg = "invalid command '" + cmd + "' in " + std::string(scene_name(state.scene));
        if (!why.empty()) msg += ": " + why;
        return Handled{state, Response{false, msg, render(state, faults)}};
    };
    auto ok = [&] { return Handled{s, Response{true, "", render(s, faults)}}; };
    auto failed = [&](const char* what) { return Handled{s, Response{false, what, render(s, faults)}}; };
    const bool in_form = has(s, Scene::EmailLogin) || has(s, Scene::EmailSignup);
    const bool idle = is_main_scene(s.scene) && !s.sidebarOpen && !s.chatWith;

    if (cmd == "read") return ok();

    if (cmd == "open_login" || cmd == "open_signup") {
        if (!has(s, Scene::Welcome)) return invalid();
        s.scene = cmd == "open_login" ? Scene::EmailLogin : Scene::EmailSignup;
        s.typedEmail.clear();
        s.typedPassword.clear();
        s.errorKind = "none";
        return ok();
    }
    if (cmd == "type_email" || cmd == "type_password") {
        auto text = arg("text");
        if (!in_form || !text) return invalid();
        (cmd == "type_email" ? s.typedEmail : s.typedPassword) = *text;
        s.errorKind = "none";
        return ok();
    }
    if (cmd == "submit_login") {
        if (!has(s, Scene::EmailLogin)) return invalid();
        const User* u = find_account(s, s.typedEmail);
        if (!well_formed_email(s.typedEmail)) s.errorKind = "malformed_email";
        else if (!u) s.errorKind = "unknown_user";
        else if (u->password != s.typedPassword) s.errorKind = "wrong_password";
        else {
            User copy = *u;
            log_in(s, copy);
            return ok();
        }
        return failed("login failed");
    }
    if (cmd == "submit_signup") {
        if (!has(s, Scene::EmailSignup)) return invalid();
        if (!well_formed_email(s.typedEmail)) s.errorKind = "malformed_email";
        else if (find_account(s, s.typedEmail)) s.errorKind = "email_taken";
        else {
            User u{s.typedEmail, s.typedPassword, "Player", "", "", Maturity::New};
            s.accounts.push_back(u);
            log_in(s, u);
            return ok();
        }
        return failed("sign-up failed");
    }
    if (cmd == "open_sidebar") {
        if (!idle) return invalid();
        s.sidebarOpen = true;
        return ok();
    }
    if (cmd == "close_sidebar") {
        if (!s.sidebarOpen) return invalid();
        s.sidebarOpen = false;
        return ok();
    }
    if (cmd == "goto") {
        auto name = arg("scene");
        auto target = name ? scene_from_name(*name) : std::nullopt;
        if (!s.sidebarOpen || !target || !is_main_scene(*target)) return invalid();
        s.sidebarOpen = false;
        if (*target != s.scene) enter(s, *target);
        return ok();
    }
    if (cmd == "back") {
        if (s.sidebarOpen) {
            s.sidebarOpen = false;
        } else if (s.chatWith) {
            s.chatWith.reset();
        } else if (in_form) {
            s.scene = Scene::Welcome;
            s.typedEmail.clear();
            s.typedPassword.clear();
            s.errorKind = "none";
        } else if (has(s, Scene::Settings)) {
            enter(s, s.sceneHistory.at(s.sceneHistory.size() - 2));
        } else if (has(s, Scene::Topics) || has(s, Scene::History) || has(s, Scene::Messages) ||
                   has(s, Scene::Profile)) {
            enter(s, Scene::Home);
        } else if (has(s, Scene::GameStats)) {
            enter(s, s.gameOrigin);
        } else {
            return invalid();
        }
        return ok();
    }
    if (cmd == "open_settings") {
        if (!idle) return invalid();
        if (!has(s, Scene::Settings)) enter(s, Scene::Settings);
        return ok();
    }
    if (cmd == "open_settings_from_profile") {
        if (!idle || !has(s, Scene::Profile)) return invalid();
        enter(s, Scene::Settings);
        return ok();
    }
    if (cmd == "set_name") {
        auto text = arg("text");
        if (!idle || !has(s, Scene::Settings) || !s.profileTab || !text || text->empty()) return invalid();
        s.user->name = *text;
        return ok();
    }
    if (cmd == "play_topic") {
        auto topic = arg("topic");
        auto outcome = arg("outcome");
        if (!idle || !(has(s, Scene::Home) || has(s, Scene::Topics)) || !topic || topic->empty() || !outcome ||
            (*outcome != "correct" && *outcome != "incorrect"))
            return invalid();
        s.gameOrigin = s.scene;
        s.gameTopic = *topic;
        s.gameOpponent = kOpponent;
        s.gameOutcome = *outcome;
        enter(s, Scene::GamePlay);
        return ok();
    }
    if (cmd == "finish_game") {
        if (!has(s, Scene::GamePlay)) return invalid();
        s.lastResult = s.gameOutcome == "correct" ? "win" : "loss";
        s.gameRecords.push_back(GameRecord{s.gameTopic, s.gameOpponent, s.lastResult});
        s.pendingIntro = false;
        enter(s, Scene::GameStats);
        return ok();
    }
    if (cmd == "open_chat") {
        auto who = arg("opponent");
        if (!(has(s, Scene::Messages) || has(s, Scene::GameStats)) || s.sidebarOpen || s.chatWith || !who ||
            who->empty())
            return invalid();
        s.chatWith = *who;
        return ok();
    }
    if (cmd == "send_message") {
        auto who = arg("opponent");
        auto text = arg("text");
        if (!s.chatWith || !who || *who != *s.chatWith || !text) return invalid();
        s.messageLog[*who].push_back(*text);
        return ok();
    }
    if (cmd == "logout") {
        if (!idle || !has(s, Scene::Settings)) return invalid();
        AppState fresh = initial_state(std::move(s.accounts));
        if (faults.count(Fault::NoLogoutCleanup)) fresh.messageLog = std::move(s.messageLog);
        s = std::move(fresh);
        return ok();
    }
    return invalid("unknown command");
}

// --- driver ----------------------------------------------------------------

namespace {

class RefSession : public Session {
public:
    RefSession(AppState s, FaultSet f) : state_(std::move(s)), faults_(std::move(f)) {}

    Response apply(const std::string& command, const std::map<std::string, std::string>& args) override {
        Handled h = handle(state_, command, args, faults_);
        state_ = std::move(h.state);
        return std::move(h.response);
    }

private:
    AppState state_;
    FaultSet faults_;
};

class RefDriver : public Driver {
public:
    std::unique_ptr<Session> start_session(const json& config) override {
        try {
            FaultSet faults;
            for (const auto& f : config.value("faults", json::array())) faults.insert(fault_from_string(f.get<std::string>()));
            std::vector<User> users;
            if (config.contains("qtdsPath")) users = load_qtds(config.at("qtdsPath").get<std::string>());
            std::string base = config.value("baseState", "Welcome");
            if (base == "Welcome") return std::make_unique<RefSession>(initial_state(std::move(users)), faults);
            if (base == "Home") {
                std::optional<Maturity> filter;
                if (config.contains("maturity")) filter = maturity_from_string(config.at("maturity").get<std::string>());
                std::size_t cursor = 0;
                User u = qtds_get_user(users, filter, cursor);
                return std::make_unique<RefSession>(logged_in_state(std::move(users), u), faults);
            }
            throw SessionError("unknown baseState '" + base + "'");
        } catch (const SessionError&) {
            throw;
        } catch (const json::exception& e) {
            throw SessionError(std::string("bad driver config: ") + e.what());
        } catch (const Error& e) {
            throw SessionError(e.what());
        }
    }
};

}  // namespace

std::unique_ptr<Driver> make_refsut_driver() {
    return std::make_unique<RefDriver>();
}

}  // namespace mbt
