/** Wire protocol of the session service: one JSON request per message,
 * one JSON response back, ids echoed. Atoms travel as program-text
 * strings; the server is the single source of truth for all state. */

export interface StateDigest {
  rules: number;
  inputs: number;
  i_true: number;
  i_open: number;
  j_true: number;
  j_false: number;
}

export interface Request {
  id: number;
  session: string;
  command: string;
}

export interface Response {
  id: number | null;
  status: "ok" | "error";
  /** Error text, command summaries, and the `state` dump all arrive here. */
  message?: string;
  warnings?: string[];
  verdict?: "yes" | "no";
  sat?: "SAT" | "UNSAT";
  models?: string[][];
  consolidated?: string[];
  pending?: boolean;
  "state-digest"?: StateDigest;
}

export function isResponse(value: unknown): value is Response {
  if (typeof value !== "object" || value === null) return false;
  const status = (value as { status?: unknown }).status;
  return status === "ok" || status === "error";
}
