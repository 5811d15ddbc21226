#include "anderson_dp/mdp_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace anderson_dp {

namespace {

constexpr const char* kMagic = "anderson-dp-mdp";
constexpr int kVersion = 1;

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw std::runtime_error("read_mdp: unexpected end of document");
        return w;
    }

    void expect(const std::string& keyword) {
        const auto w = word();
        if (w != keyword) {
            throw std::runtime_error(fmt::format("read_mdp: expected '{}', found '{}'", keyword, w));
        }
    }

    std::size_t count() {
        const auto w = word();
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
        if (ec != std::errc() || ptr != w.data() + w.size()) {
            throw std::runtime_error(fmt::format("read_mdp: '{}' is not an integer", w));
        }
        return value;
    }

    double real() {
        const auto w = word();
        // strtod is correctly rounded on glibc; from_chars for double needs GCC 12.
        char* end = nullptr;
        const double value = std::strtod(w.c_str(), &end);
        if (end != w.c_str() + w.size()) {
            throw std::runtime_error(fmt::format("read_mdp: '{}' is not a real number", w));
        }
        return value;
    }

private:
    std::istream& in_;
};

}  // namespace

void write_mdp(std::ostream& out, const Mdp& mdp) {
    fmt::print(out, "{} {}\n", kMagic, kVersion);
    fmt::print(out, "num_states {}\nnum_actions {}\ngamma {:.17g}\n", mdp.num_states(),
               mdp.num_actions(), mdp.gamma());
    out << "rewards\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            fmt::print(out, "{}{:.17g}", a == 0 ? "" : " ", mdp.reward(s, a));
        }
        out << '\n';
    }
    out << "transitions\n";
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            const auto succ = mdp.successors(s, a);
            fmt::print(out, "{} {} {}", s, a, succ.size());
            for (const auto& t : succ) fmt::print(out, " {} {:.17g}", t.next_state, t.probability);
            out << '\n';
        }
    }
}

std::string to_text(const Mdp& mdp) {
    std::ostringstream out;
    write_mdp(out, mdp);
    return out.str();
}

Mdp read_mdp(std::istream& in) {
    Reader r(in);
    r.expect(kMagic);
    if (const auto version = r.count(); version != kVersion) {
        throw std::runtime_error(fmt::format("read_mdp: unsupported format version {}", version));
    }
    r.expect("num_states");
    const auto num_states = r.count();
    r.expect("num_actions");
    const auto num_actions = r.count();
    r.expect("gamma");
    const double gamma = r.real();

    const std::size_t cells = num_states * num_actions;
    r.expect("rewards");
    std::vector<double> rewards(cells);
    for (auto& x : rewards) x = r.real();

    r.expect("transitions");
    std::vector<std::vector<Transition>> successors(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const auto s = r.count();
        const auto a = r.count();
        if (s * num_actions + a != c || a >= num_actions) {
            throw std::runtime_error(fmt::format("read_mdp: transition rows out of order at ({}, {})", s, a));
        }
        const auto k = r.count();
        if (k > num_states) throw std::runtime_error("read_mdp: successor count exceeds state count");
        successors[c].reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto next = r.count();
            if (next >= num_states) throw std::runtime_error("read_mdp: successor index out of range");
            successors[c].push_back({static_cast<std::uint32_t>(next), r.real()});
        }
    }
    return Mdp(num_states, num_actions, successors, std::move(rewards), gamma);
}

Mdp mdp_from_text(const std::string& text) {
    std::istringstream in(text);
    return read_mdp(in);
}

void save_mdp(const std::filesystem::path& path, const Mdp& mdp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    write_mdp(out, mdp);
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

Mdp load_mdp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
    return read_mdp(in);
}

}  // namespace anderson_dp
