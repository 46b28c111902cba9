#pragma once

// Line-oriented network description:
//
//   network <name> seed=<u64> precision=<half|single>
//   group <name> size=<n> type=<RS|FS|poisson> [a=<f> b=<f> c=<f> d=<f>]
//   project <pre> -> <post> fanin=<n> weight=<f> delay=<ms> [tag=<word>]
//   stimulus <group> rate=<hz> window=<start_ms>:<end_ms>
//
// '#' starts a comment that runs to end of line.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mcusnn/model.hpp"

namespace mcusnn {

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size() || line[i] == '#') break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

class LineParser {
public:
    LineParser(std::vector<Token> tokens, std::size_t line) : tokens_(std::move(tokens)), line_(line) {}

    [[noreturn]] void fail(const std::string& msg, std::size_t column) const {
        throw ConfigError(ConfigErrorKind::Syntax, msg, line_, column);
    }

    const Token& at(std::size_t i, const char* what) const {
        if (i >= tokens_.size()) {
            const std::size_t col = tokens_.empty() ? 1 : tokens_.back().column + tokens_.back().text.size();
            fail(std::string("expected ") + what, col);
        }
        return tokens_[i];
    }

    /// Parses tokens [first, end) as key=value pairs restricted to `allowed`.
    void collect_options(std::size_t first, std::initializer_list<std::string_view> allowed) {
        for (std::size_t i = first; i < tokens_.size(); ++i) {
            const auto& tok = tokens_[i];
            const auto eq = tok.text.find('=');
            if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.text.size()) {
                fail("expected key=value, got '" + std::string(tok.text) + "'", tok.column);
            }
            const auto key = tok.text.substr(0, eq);
            bool known = false;
            for (auto k : allowed) known = known || k == key;
            if (!known) fail("unknown option '" + std::string(key) + "'", tok.column);
            if (options_.count(std::string(key)) != 0) fail("duplicate option '" + std::string(key) + "'", tok.column);
            options_.emplace(std::string(key), Option{tok.text.substr(eq + 1), tok.column + eq + 1});
        }
    }

    bool has(const std::string& key) const { return options_.count(key) != 0; }

    std::string_view text(const std::string& key, std::size_t fallback_column) const {
        auto it = options_.find(key);
        if (it == options_.end()) fail("missing option '" + key + "'", fallback_column);
        return it->second.value;
    }

    std::size_t column_of(const std::string& key) const {
        auto it = options_.find(key);
        return it == options_.end() ? 1 : it->second.column;
    }

    template <class T>
    T number(std::string_view s, std::size_t column) const {
        T value{};
        const char* first = s.data();
        const char* last = s.data() + s.size();
        // from_chars rejects a leading '+'
        if constexpr (std::is_floating_point_v<T>) {
            if (first != last && *first == '+') ++first;
        }
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            fail("malformed number '" + std::string(s) + "'", column);
        }
        return value;
    }

    template <class T>
    T option_number(const std::string& key, std::size_t fallback_column) const {
        return number<T>(text(key, fallback_column), column_of(key));
    }

    std::size_t size() const { return tokens_.size(); }

private:
    struct Option {
        std::string_view value;
        std::size_t column;
    };
    std::vector<Token> tokens_;
    std::size_t line_;
    std::map<std::string, Option> options_;
};

inline bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '_' || ch == '-' || ch == '.' || ch == '[' || ch == ']';
        if (!ok) return false;
    }
    return s != "->";
}

}  // namespace detail

/// Parses and validates a network document.
inline NetworkSpec parse_network(std::string_view text) {
    using detail::LineParser;
    NetworkSpec spec;
    bool have_header = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto tokens = detail::tokenize(line);
        if (tokens.empty()) continue;
        LineParser lp(tokens, line_no);
        const auto directive = tokens[0].text;

        auto name_at = [&](std::size_t i, const char* what) {
            const auto& tok = lp.at(i, what);
            if (!detail::valid_identifier(tok.text)) {
                lp.fail("invalid identifier '" + std::string(tok.text) + "'", tok.column);
            }
            return std::string(tok.text);
        };

        if (directive == "network") {
            if (have_header) lp.fail("duplicate network directive", tokens[0].column);
            have_header = true;
            spec.name = name_at(1, "network name");
            lp.collect_options(2, {"seed", "precision"});
            if (lp.has("seed")) spec.seed = lp.option_number<std::uint64_t>("seed", 1);
            if (lp.has("precision")) {
                const auto p = lp.text("precision", 1);
                if (p == "half") {
                    spec.precision = Precision::Half;
                } else if (p == "single") {
                    spec.precision = Precision::Single;
                } else {
                    lp.fail("precision must be half or single", lp.column_of("precision"));
                }
            }
        } else if (directive == "group") {
            GroupSpec g;
            g.name = name_at(1, "group name");
            lp.collect_options(2, {"size", "type", "a", "b", "c", "d"});
            g.size = lp.option_number<std::size_t>("size", tokens[0].column);
            const auto type = lp.text("type", tokens[0].column);
            if (type == "RS") {
                g.kind = NeuronKind::Excitatory;
                g.params = IzhParams::regular_spiking();
            } else if (type == "FS") {
                g.kind = NeuronKind::Inhibitory;
                g.params = IzhParams::fast_spiking();
            } else if (type == "poisson") {
                g.kind = NeuronKind::PoissonGenerator;
            } else {
                lp.fail("type must be RS, FS or poisson", lp.column_of("type"));
            }
            for (const char* key : {"a", "b", "c", "d"}) {
                if (!lp.has(key)) continue;
                if (!g.params) lp.fail("generator groups take no Izhikevich parameters", lp.column_of(key));
                const auto value = lp.option_number<float>(key, 1);
                switch (key[0]) {
                    case 'a': g.params->a = value; break;
                    case 'b': g.params->b = value; break;
                    case 'c': g.params->c = value; break;
                    default: g.params->d = value; break;
                }
            }
            spec.groups.push_back(std::move(g));
        } else if (directive == "project") {
            ProjectionSpec p;
            p.pre = name_at(1, "pre-synaptic group");
            const auto& arrow = lp.at(2, "'->'");
            if (arrow.text != "->") lp.fail("expected '->'", arrow.column);
            p.post = name_at(3, "post-synaptic group");
            lp.collect_options(4, {"fanin", "weight", "delay", "tag"});
            p.fan_in = lp.option_number<std::size_t>("fanin", tokens[0].column);
            p.weight = lp.option_number<float>("weight", tokens[0].column);
            p.delay_ms = lp.option_number<int>("delay", tokens[0].column);
            if (lp.has("tag")) p.tag = std::string(lp.text("tag", 1));
            spec.projections.push_back(std::move(p));
        } else if (directive == "stimulus") {
            StimulusSpec s;
            s.group = name_at(1, "stimulus group");
            lp.collect_options(2, {"rate", "window"});
            s.rate_hz = lp.option_number<double>("rate", tokens[0].column);
            const auto window = lp.text("window", tokens[0].column);
            const auto colon = window.find(':');
            if (colon == std::string_view::npos) lp.fail("window must be <start_ms>:<end_ms>", lp.column_of("window"));
            s.start_ms = lp.number<std::int64_t>(window.substr(0, colon), lp.column_of("window"));
            s.end_ms = lp.number<std::int64_t>(window.substr(colon + 1), lp.column_of("window") + colon + 1);
            spec.stimuli.push_back(std::move(s));
        } else {
            lp.fail("unknown directive '" + std::string(directive) + "'", tokens[0].column);
        }
    }

    validate(spec);
    return spec;
}

/// Reads a config file; I/O failures surface as std::runtime_error.
inline NetworkSpec load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open network config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

/// Inverse of parse_network for specs whose floats print exactly.
inline std::string format_network(const NetworkSpec& spec) {
    std::ostringstream out;
    out.precision(9);
    out << "network " << spec.name << " seed=" << spec.seed << " precision=" << to_string(spec.precision) << "\n";
    for (const auto& g : spec.groups) {
        out << "group " << g.name << " size=" << g.size << " type=";
        if (g.kind == NeuronKind::PoissonGenerator) {
            out << "poisson\n";
            continue;
        }
        const bool rs = g.kind == NeuronKind::Excitatory;
        out << (rs ? "RS" : "FS");
        if (*g.params != (rs ? IzhParams::regular_spiking() : IzhParams::fast_spiking())) {
            out << " a=" << g.params->a << " b=" << g.params->b << " c=" << g.params->c << " d=" << g.params->d;
        }
        out << "\n";
    }
    for (const auto& p : spec.projections) {
        out << "project " << p.pre << " -> " << p.post << " fanin=" << p.fan_in << " weight=" << p.weight
            << " delay=" << p.delay_ms;
        if (!p.tag.empty()) out << " tag=" << p.tag;
        out << "\n";
    }
    for (const auto& s : spec.stimuli) {
        out << "stimulus " << s.group << " rate=" << s.rate_hz << " window=" << s.start_ms << ":" << s.end_ms << "\n";
    }
    return out.str();
}

}  // namespace mcusnn
