#include <mpad/fleet.hpp>

#include <mpad/error.hpp>
#include <mpad/wire.hpp>

#include <set>
#include <sstream>

namespace mpad {

namespace {

std::vector<std::string> split_words(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::vector<std::string> out;
    for(std::string w; in >> w;) {
        out.push_back(std::move(w));
    }
    return out;
}

DeviceId parse_device(const std::string& word) {
    const std::uint64_t v = parse_count(word);
    if(v > 0xffffffffu) {
        throw FormatError("device id out of range: " + word);
    }
    return static_cast<DeviceId>(v);
}

Fleet provision_from(const std::vector<std::string>& words) {
    std::map<std::string, std::uint64_t> fields;
    for(std::size_t i = 1; i < words.size(); ++i) {
        const auto eq = words[i].find('=');
        if(eq == std::string::npos) {
            throw FormatError("expected key=value, got '" + words[i] + "'");
        }
        fields[words[i].substr(0, eq)] = parse_count(std::string_view(words[i]).substr(eq + 1));
    }
    auto need = [&](const char* name) {
        const auto it = fields.find(name);
        if(it == fields.end()) {
            throw FormatError(std::string("provision is missing ") + name + "=");
        }
        return it->second;
    };
    SystemParams params;
    params.devices = need("U");
    params.n = need("n");
    params.k = need("k");
    params.m = need("m");
    params.eta_max = need("eta_max");
    params.lambda = need("lambda");
    const std::uint64_t seed = need("seed");
    FleetOptions options;
    if(fields.contains("distributor")) {
        options.distributor = static_cast<DeviceId>(fields["distributor"]);
    }
    if(fields.contains("reserve")) {
        options.reserve = fields["reserve"];
    }
    for(const auto& [name, value] : fields) {
        static const std::set<std::string> known = {"U", "n", "k", "m", "eta_max", "lambda", "seed", "distributor",
                                                     "reserve"};
        if(!known.contains(name)) {
            throw FormatError("unknown provision field '" + name + "'");
        }
    }
    return Fleet::provision(params, RandomSource::seeded(seed), options);
}

}  // namespace

ScenarioReport run_scenario(std::string_view text, const std::filesystem::path& base) {
    ScenarioReport report;
    std::istringstream in{std::string(text)};
    std::size_t number = 0;
    for(std::string line; std::getline(in, line);) {
        ++number;
        auto words = split_words(line);
        if(words.empty() || words.front().starts_with('#')) {
            continue;
        }
        const std::string where = "line " + std::to_string(number) + ": ";
        std::optional<std::string> expected;
        if(words.front() == "expect") {
            if(words.size() < 3) {
                throw FormatError(where + "expect needs an error kind and a command");
            }
            expected = words[1];
            words.erase(words.begin(), words.begin() + 2);
        }
        const std::string& cmd = words.front();
        auto arity = [&](std::size_t count) {
            if(words.size() != count + 1) {
                throw FormatError(where + cmd + " takes " + std::to_string(count) + " argument(s)");
            }
        };
        auto fleet = [&]() -> Fleet& {
            if(!report.fleet) {
                throw FormatError(where + cmd + " before provision");
            }
            return *report.fleet;
        };

        try {
            if(cmd == "provision") {
                report.fleet.reset();
                report.fleet.emplace(provision_from(words));
            } else if(cmd == "send") {
                arity(3);
                Fleet& f = fleet();
                const auto bytes = from_hex(words[3]);
                const std::uint64_t m = f.params().m;
                if(bytes.size() != (m + 7) / 8) {
                    throw FormatError(where + "payload must be " + std::to_string((m + 7) / 8) + " bytes");
                }
                const Message payload = BitVector::from_bytes(bytes, m);
                DeliveryRecord rec = f.send_message(parse_device(words[1]), parse_device(words[2]), payload);
                report.deliveries.push_back(std::move(rec));
                report.sent.push_back(payload);
            } else if(cmd == "dynkey") {
                arity(2);
                fleet().request_dynamic_key(parse_device(words[1]), parse_device(words[2]));
            } else if(cmd == "admit") {
                arity(0);
                fleet().admit_device();
            } else if(cmd == "eavesdrop-dump") {
                arity(1);
                std::filesystem::path path(words[1]);
                if(path.is_relative() && !base.empty()) {
                    path = base / path;
                }
                write_file(path, fleet().eavesdrop().dump());
                report.dumps.push_back(path);
            } else {
                throw FormatError(where + "unknown command '" + cmd + "'");
            }
        } catch(const Error& e) {
            if(!expected && dynamic_cast<const FormatError*>(&e)) {
                throw;
            }
            if(!expected) {
                throw ScenarioFailure(where + std::string(error_kind(e)) + ": " + e.what());
            }
            if(error_kind(e) != *expected) {
                throw ScenarioFailure(where + "expected " + *expected + ", got " + std::string(error_kind(e)) + ": " +
                                      e.what());
            }
            ++report.expected_errors;
            ++report.commands;
            continue;
        }
        if(expected) {
            throw ScenarioFailure(where + "expected " + *expected + " but the command succeeded");
        }
        ++report.commands;
    }
    return report;
}

}  // namespace mpad
