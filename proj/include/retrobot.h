/* SPDX-License-Identifier: Apache-2.0 */
#ifndef RETROBOT_H
#define RETROBOT_H

/*
 * C interface to the retrospective bot. All strings are UTF-8. Strings
 * returned through `char**` out-parameters are owned by the caller and must be
 * released with retro_string_free(). Timestamps are ISO-8601 text; NULL means
 * "use the system clock". On failure a call returns a non-zero status and
 * retro_last_error() describes it (per thread).
 */

#include <stddef.h>

#if defined(_WIN32)
#  define RETRO_API __declspec(dllexport)
#else
#  define RETRO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct retro_bot retro_bot;
typedef struct retro_console retro_console;

typedef enum retro_status {
    RETRO_OK = 0,
    RETRO_E_INVALID_ARGUMENT = 1,
    RETRO_E_CONFIG = 2,
    RETRO_E_IO = 3,
    RETRO_E_FORMAT = 4,
    RETRO_E_JOURNAL_CORRUPT = 5,
    RETRO_E_UNKNOWN_ITEM = 6,
    RETRO_E_ALREADY_CLOSED = 7,
    RETRO_E_BIND = 8,
    RETRO_E_INTERNAL = 99
} retro_status;

typedef enum retro_adapter {
    RETRO_ADAPTER_CLI = 0,
    RETRO_ADAPTER_HTTP = 1
} retro_adapter;

RETRO_API const char* retro_last_error(void);
RETRO_API const char* retro_status_name(retro_status status);
RETRO_API void retro_string_free(char* s);

/* Loads the config file, the journal and the artifact files. */
RETRO_API retro_status retro_bot_open(const char* config_path, retro_adapter adapter, retro_bot** out);
RETRO_API void retro_bot_free(retro_bot* bot);

/* Replies as JSON: {"replies":[{"channel":...,"text":...}]}. */
RETRO_API retro_status retro_bot_handle_message(retro_bot* bot, const char* channel, const char* author,
                                                const char* text, const char* at, char** replies_json);
/* Newly appended samples as a JSON array. */
RETRO_API retro_status retro_bot_tick(retro_bot* bot, const char* now, char** samples_json);
/* Rendered retrospective report (plain text). */
RETRO_API retro_status retro_bot_report(retro_bot* bot, const char* now, char** text);
/* Reminder text if one is due at `now`, otherwise *text is set to NULL. */
RETRO_API retro_status retro_bot_reminder(retro_bot* bot, const char* now, char** text);
/* Action items as a JSON array. */
RETRO_API retro_status retro_bot_actions(retro_bot* bot, char** actions_json);

/* Serves the HTTP API and the periodic scheduler until retro_bot_stop(). */
RETRO_API retro_status retro_bot_serve(retro_bot* bot, const char* host, int port);
RETRO_API void retro_bot_stop(retro_bot* bot);

/* Console adapter: feeds one input line, returns the text to print. */
RETRO_API retro_status retro_console_open(retro_bot* bot, const char* now, retro_console** out);
RETRO_API retro_status retro_console_line(retro_console* console, const char* line, char** output);
RETRO_API void retro_console_free(retro_console* console);

/*
 * Validates artifact exports and writes them, normalized to JSONL, to the
 * paths configured in `config_path`. `commits` may be JSONL or
 * `git log --pretty=format:@%H|%ae|%aI|%s --numstat` output. Any input may
 * be NULL. `summary` receives a one-line description of what was stored.
 */
RETRO_API retro_status retro_ingest(const char* config_path, const char* commits, const char* issues,
                                    const char* builds, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* RETROBOT_H */
