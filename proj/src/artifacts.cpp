// SPDX-License-Identifier: Apache-2.0
#include "retro/artifacts.hpp"

#include "retro/error.hpp"
#include "retro/text.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

namespace retro {

using nlohmann::json;

namespace {

bool has_suffix(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Per-line schema violations; converted to Error::at_line by the caller.
struct SchemaError {
    std::string reason;
};

const json& field(const json& obj, const char* name)
{
    auto it = obj.find(name);
    if (it == obj.end())
        throw SchemaError{fmt::format("missing field '{}'", name)};
    return *it;
}

std::string string_field(const json& obj, const char* name)
{
    const auto& v = field(obj, name);
    if (!v.is_string())
        throw SchemaError{fmt::format("field '{}' must be a string", name)};
    return v.get<std::string>();
}

Timestamp time_field(const json& obj, const char* name)
{
    auto text = string_field(obj, name);
    auto t = try_parse_timestamp(text);
    if (!t)
        throw SchemaError{fmt::format("field '{}' is not an ISO-8601 timestamp: '{}'", name, text)};
    return *t;
}

std::optional<Timestamp> optional_time_field(const json& obj, const char* name)
{
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    return time_field(obj, name);
}

std::optional<std::int64_t> optional_count(const json& obj, const char* name)
{
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    if (!it->is_number_integer())
        throw SchemaError{fmt::format("field '{}' must be an integer or null", name)};
    auto v = it->get<std::int64_t>();
    if (v < 0)
        throw SchemaError{fmt::format("field '{}' must not be negative", name)};
    return v;
}

template <typename Record, typename Decode>
std::vector<Record> parse_jsonl(std::istream& in, Decode decode)
{
    std::vector<Record> out;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (text::trim(line).empty())
            continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            throw Error::at_line(Errc::format, line_number, "not valid JSON");
        if (!obj.is_object())
            throw Error::at_line(Errc::format, line_number, "expected a JSON object");
        try {
            out.push_back(decode(obj));
        } catch (const SchemaError& e) {
            throw Error::at_line(Errc::format, line_number, e.reason);
        } catch (const json::exception& e) {
            throw Error::at_line(Errc::format, line_number, e.what());
        }
    }
    return out;
}

CommitRecord decode_commit(const json& obj)
{
    CommitRecord c;
    c.hash = string_field(obj, "hash");
    if (c.hash.empty())
        throw SchemaError{"field 'hash' must not be empty"};
    c.author_email = string_field(obj, "author_email");
    c.authored_at = time_field(obj, "authored_at");
    c.message = string_field(obj, "message");
    if (auto it = obj.find("changes"); it != obj.end() && !it->is_null()) {
        if (!it->is_array())
            throw SchemaError{"field 'changes' must be an array"};
        for (const auto& ch : *it) {
            if (!ch.is_object())
                throw SchemaError{"each change must be an object"};
            std::optional<std::string> patch;
            if (auto p = ch.find("patch"); p != ch.end() && !p->is_null()) {
                if (!p->is_string())
                    throw SchemaError{"field 'patch' must be a string"};
                patch = p->get<std::string>();
            }
            c.changes.push_back(FileChange::make(string_field(ch, "path"), optional_count(ch, "added"),
                                                 optional_count(ch, "removed"), std::move(patch)));
        }
    }
    return c;
}

IssueRecord decode_issue(const json& obj)
{
    IssueRecord r;
    r.id = string_field(obj, "id");
    auto kind = string_field(obj, "kind");
    if (kind == "story")
        r.kind = IssueKind::story;
    else if (kind == "bug")
        r.kind = IssueKind::bug;
    else if (kind == "task")
        r.kind = IssueKind::task;
    else
        throw SchemaError{fmt::format("unknown issue kind '{}'", kind)};
    if (auto it = obj.find("story_points"); it != obj.end() && !it->is_null()) {
        if (!it->is_number())
            throw SchemaError{"field 'story_points' must be a number or null"};
        double points = it->get<double>();
        if (!std::isfinite(points) || points < 0)
            throw SchemaError{"field 'story_points' must be a non-negative number"};
        r.story_points = points;
    }
    auto status = string_field(obj, "status");
    if (status == "open")
        r.status = IssueStatus::open;
    else if (status == "done")
        r.status = IssueStatus::done;
    else
        throw SchemaError{fmt::format("unknown issue status '{}'", status)};
    r.created_at = time_field(obj, "created_at");
    r.closed_at = optional_time_field(obj, "closed_at");
    if (r.status == IssueStatus::done && !r.closed_at)
        throw SchemaError{"done issue lacks closed_at"};
    if (r.closed_at && *r.closed_at < r.created_at)
        throw SchemaError{"closed_at precedes created_at"};
    return r;
}

BuildRecord decode_build(const json& obj)
{
    BuildRecord b;
    b.id = string_field(obj, "id");
    b.finished_at = time_field(obj, "finished_at");
    auto status = string_field(obj, "status");
    if (status == "passed")
        b.status = BuildStatus::passed;
    else if (status == "failed")
        b.status = BuildStatus::failed;
    else
        throw SchemaError{fmt::format("unknown build status '{}'", status)};
    return b;
}

json optional_json(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

const char* kind_name(IssueKind k)
{
    switch (k) {
    case IssueKind::story: return "story";
    case IssueKind::bug: return "bug";
    case IssueKind::task: return "task";
    }
    return "task";
}

std::optional<std::int64_t> numstat_count(std::string_view field, std::size_t line_number)
{
    if (field == "-")
        return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || v < 0)
        throw Error::at_line(Errc::format, line_number, fmt::format("bad numstat count '{}'", field));
    return v;
}

} // namespace

bool is_test_path(std::string_view path)
{
    std::string_view filename = path;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        auto segment = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
        if (segment == "test" || segment == "tests" || segment == "spec")
            return true;
        if (slash == std::string_view::npos) {
            filename = segment;
            break;
        }
        start = slash + 1;
    }
    if (filename.find("_test.") != std::string_view::npos || filename.find(".test.") != std::string_view::npos)
        return true;
    auto dot = filename.rfind('.');
    auto stem = dot == std::string_view::npos || dot == 0 ? filename : filename.substr(0, dot);
    return has_suffix(stem, "Test");
}

FileChange FileChange::make(std::string path, std::optional<std::int64_t> added, std::optional<std::int64_t> removed,
                            std::optional<std::string> patch)
{
    FileChange c;
    c.is_test = is_test_path(path);
    c.path = std::move(path);
    c.added = added;
    c.removed = removed;
    c.patch = std::move(patch);
    return c;
}

ArtifactStore::ArtifactStore(std::vector<CommitRecord> commits, std::vector<IssueRecord> issues,
                             std::vector<BuildRecord> builds)
    : commits_(std::move(commits)), issues_(std::move(issues)), builds_(std::move(builds))
{
    std::set<std::string_view> seen;
    for (const auto& c : commits_)
        if (!seen.insert(c.hash).second)
            throw Error(Errc::format, fmt::format("duplicate commit hash '{}'", c.hash));
    seen.clear();
    for (const auto& b : builds_)
        if (!seen.insert(b.id).second)
            throw Error(Errc::format, fmt::format("duplicate build id '{}'", b.id));

    std::stable_sort(commits_.begin(), commits_.end(),
                     [](const auto& a, const auto& b) { return a.authored_at < b.authored_at; });
    std::stable_sort(issues_.begin(), issues_.end(),
                     [](const auto& a, const auto& b) { return a.created_at < b.created_at; });
    std::stable_sort(builds_.begin(), builds_.end(),
                     [](const auto& a, const auto& b) { return a.finished_at < b.finished_at; });
}

std::vector<CommitRecord> parse_commit_jsonl(std::istream& in)
{
    return parse_jsonl<CommitRecord>(in, decode_commit);
}

std::vector<IssueRecord> parse_issue_jsonl(std::istream& in)
{
    return parse_jsonl<IssueRecord>(in, decode_issue);
}

std::vector<BuildRecord> parse_build_jsonl(std::istream& in)
{
    return parse_jsonl<BuildRecord>(in, decode_build);
}

std::vector<CommitRecord> parse_git_numstat(std::string_view text_in)
{
    std::vector<CommitRecord> out;
    std::size_t line_number = 0;
    for (auto raw : text::split_lines(text_in)) {
        ++line_number;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (text::trim(line).empty())
            continue;

        if (line.front() == '@') {
            // The subject is the last field and may itself contain '|'.
            std::string_view rest = line.substr(1);
            std::string_view fields[3];
            for (auto& f : fields) {
                auto bar = rest.find('|');
                if (bar == std::string_view::npos)
                    throw Error::at_line(Errc::format, line_number, "commit header needs 4 '|'-separated fields");
                f = rest.substr(0, bar);
                rest = rest.substr(bar + 1);
            }
            if (fields[0].empty())
                throw Error::at_line(Errc::format, line_number, "empty commit hash");
            auto when = try_parse_timestamp(fields[2]);
            if (!when)
                throw Error::at_line(Errc::format, line_number, fmt::format("bad author date '{}'", fields[2]));
            out.push_back(CommitRecord{std::string(fields[0]), std::string(fields[1]), *when, std::string(rest), {}});
            continue;
        }

        if (out.empty())
            throw Error::at_line(Errc::format, line_number, "numstat line before any commit header");
        auto tab1 = line.find('\t');
        auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
        if (tab2 == std::string_view::npos || tab2 + 1 >= line.size())
            throw Error::at_line(Errc::format, line_number, "expected 'added<TAB>removed<TAB>path'");
        auto added = numstat_count(line.substr(0, tab1), line_number);
        auto removed = numstat_count(line.substr(tab1 + 1, tab2 - tab1 - 1), line_number);
        out.back().changes.push_back(FileChange::make(std::string(line.substr(tab2 + 1)), added, removed));
    }
    return out;
}

void write_commit_jsonl(std::ostream& out, std::span<const CommitRecord> commits)
{
    for (const auto& c : commits) {
        json changes = json::array();
        for (const auto& ch : c.changes) {
            json j{{"path", ch.path}, {"added", optional_json(ch.added)}, {"removed", optional_json(ch.removed)}};
            if (ch.patch)
                j["patch"] = *ch.patch;
            changes.push_back(std::move(j));
        }
        json j{{"hash", c.hash},
               {"author_email", c.author_email},
               {"authored_at", format_timestamp(c.authored_at)},
               {"message", c.message},
               {"changes", std::move(changes)}};
        out << j.dump() << '\n';
    }
}

void write_issue_jsonl(std::ostream& out, std::span<const IssueRecord> issues)
{
    for (const auto& r : issues) {
        json j{{"id", r.id},
               {"kind", kind_name(r.kind)},
               {"story_points", r.story_points ? json(*r.story_points) : json(nullptr)},
               {"status", r.status == IssueStatus::done ? "done" : "open"},
               {"created_at", format_timestamp(r.created_at)},
               {"closed_at", r.closed_at ? json(format_timestamp(*r.closed_at)) : json(nullptr)}};
        out << j.dump() << '\n';
    }
}

void write_build_jsonl(std::ostream& out, std::span<const BuildRecord> builds)
{
    for (const auto& b : builds) {
        json j{{"id", b.id},
               {"finished_at", format_timestamp(b.finished_at)},
               {"status", b.status == BuildStatus::passed ? "passed" : "failed"}};
        out << j.dump() << '\n';
    }
}

ArtifactStore window(const ArtifactStore& store, Timestamp from, Timestamp to)
{
    if (from > to)
        throw Error(Errc::invalid_window,
                    fmt::format("window start {} is after its end {}", format_timestamp(from), format_timestamp(to)));
    auto inside = [&](Timestamp t) { return t >= from && t < to; };

    std::vector<CommitRecord> commits;
    for (const auto& c : store.commits())
        if (inside(c.authored_at))
            commits.push_back(c);
    std::vector<IssueRecord> issues;
    for (const auto& r : store.issues())
        if (inside(r.created_at) || (r.closed_at && inside(*r.closed_at)))
            issues.push_back(r);
    std::vector<BuildRecord> builds;
    for (const auto& b : store.builds())
        if (inside(b.finished_at))
            builds.push_back(b);
    return ArtifactStore(std::move(commits), std::move(issues), std::move(builds));
}

} // namespace retro
