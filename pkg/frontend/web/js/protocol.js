/** Wire protocol of the session service: one JSON request per message,
 * one JSON response back, ids echoed. Atoms travel as program-text
 * strings; the server is the single source of truth for all state. */
export function isResponse(value) {
    if (typeof value !== "object" || value === null)
        return false;
    const status = value.status;
    return status === "ok" || status === "error";
}
