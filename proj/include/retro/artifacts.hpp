// SPDX-License-Identifier: Apache-2.0
#pragma once

// Normalized project artifacts (commits, issues, builds) and their
// interchange formats.

#include "retro/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retro {

/// A path counts as a test file when a segment is `test`, `tests` or `spec`,
/// or the file name contains `_test.` / `.test.`, or its stem ends in `Test`.
bool is_test_path(std::string_view path);

struct FileChange {
    std::string path;
    std::optional<std::int64_t> added;   ///< absent for binary files
    std::optional<std::int64_t> removed; ///< absent for binary files
    std::optional<std::string> patch;
    bool is_test = false;

    static FileChange make(std::string path, std::optional<std::int64_t> added,
                           std::optional<std::int64_t> removed, std::optional<std::string> patch = std::nullopt);

    friend bool operator==(const FileChange&, const FileChange&) = default;
};

struct CommitRecord {
    std::string hash;
    std::string author_email;
    Timestamp authored_at{};
    std::string message;
    std::vector<FileChange> changes;

    friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

enum class IssueKind { story, bug, task };
enum class IssueStatus { open, done };

struct IssueRecord {
    std::string id;
    IssueKind kind = IssueKind::task;
    std::optional<double> story_points;
    IssueStatus status = IssueStatus::open;
    Timestamp created_at{};
    std::optional<Timestamp> closed_at;

    friend bool operator==(const IssueRecord&, const IssueRecord&) = default;
};

enum class BuildStatus { passed, failed };

struct BuildRecord {
    std::string id;
    Timestamp finished_at{};
    BuildStatus status = BuildStatus::passed;

    friend bool operator==(const BuildRecord&, const BuildRecord&) = default;
};

/// Immutable once built. Each list is stably sorted by its primary timestamp
/// (authored_at, created_at, finished_at); commit hashes and build ids must be
/// unique.
class ArtifactStore {
public:
    ArtifactStore() = default;
    ArtifactStore(std::vector<CommitRecord> commits, std::vector<IssueRecord> issues,
                  std::vector<BuildRecord> builds);

    std::span<const CommitRecord> commits() const { return commits_; }
    std::span<const IssueRecord> issues() const { return issues_; }
    std::span<const BuildRecord> builds() const { return builds_; }

    bool empty() const { return commits_.empty() && issues_.empty() && builds_.empty(); }

    friend bool operator==(const ArtifactStore&, const ArtifactStore&) = default;

private:
    std::vector<CommitRecord> commits_;
    std::vector<IssueRecord> issues_;
    std::vector<BuildRecord> builds_;
};

// All parsers throw Error(format) carrying the 1-based line number of the
// first offending line. Blank lines are skipped.
std::vector<CommitRecord> parse_commit_jsonl(std::istream& in);
std::vector<IssueRecord> parse_issue_jsonl(std::istream& in);
std::vector<BuildRecord> parse_build_jsonl(std::istream& in);

/// Parses `git log --pretty=format:@%H|%ae|%aI|%s --numstat`.
std::vector<CommitRecord> parse_git_numstat(std::string_view text);

void write_commit_jsonl(std::ostream& out, std::span<const CommitRecord> commits);
void write_issue_jsonl(std::ostream& out, std::span<const IssueRecord> issues);
void write_build_jsonl(std::ostream& out, std::span<const BuildRecord> builds);

/// Half-open [from, to) filter. Commits by authored_at, builds by
/// finished_at, issues when created_at or closed_at falls inside.
/// Throws Error(invalid_window) when from > to.
ArtifactStore window(const ArtifactStore& store, Timestamp from, Timestamp to);

} // namespace retro
