// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fixture builders shared by the test binaries.

#include "retro/artifacts.hpp"
#include "retro/config.hpp"
#include "retro/model.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

namespace retro::testing {

inline Timestamp at(const char* iso) { return parse_timestamp(iso); }

inline CommitRecord commit(std::string hash, std::string author, const char* when, std::string message = "change",
                           std::vector<FileChange> changes = {})
{
    return CommitRecord{std::move(hash), std::move(author), at(when), std::move(message), std::move(changes)};
}

inline FileChange change(std::string path, std::optional<std::int64_t> added, std::optional<std::int64_t> removed,
                         std::optional<std::string> patch = std::nullopt)
{
    return FileChange::make(std::move(path), added, removed, std::move(patch));
}

inline IssueRecord issue(std::string id, IssueKind kind, std::optional<double> points, const char* created,
                         const char* closed = nullptr)
{
    IssueRecord r;
    r.id = std::move(id);
    r.kind = kind;
    r.story_points = points;
    r.created_at = at(created);
    if (closed) {
        r.closed_at = at(closed);
        r.status = IssueStatus::done;
    }
    return r;
}

inline TeamConfig team(const char* start = "2019-01-07T00:00:00Z", int days = 14)
{
    TeamConfig c;
    c.team_name = "test";
    c.iteration_start = at(start);
    c.iteration_length = days * kOneDay;
    c.workdir = std::filesystem::temp_directory_path();
    return c;
}

/// Removes the directory on destruction.
class TempDir {
public:
    TempDir()
    {
        auto base = std::filesystem::temp_directory_path() / "retrobot-test-XXXXXX";
        std::string tmpl = base.string();
        if (!::mkdtemp(tmpl.data()))
            throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const
    {
        auto p = path_ / name;
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline std::filesystem::path fixture_dir() { return RETRO_FIXTURE_DIR; }

} // namespace retro::testing
