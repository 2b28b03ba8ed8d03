import { SavedSession } from "./types.js";

/** Where a session autosaves after every score. */
export interface SessionStore {
  save(data: SavedSession): void;
  load(): SavedSession | null;
  clear(): void;
}

export class MemoryStore implements SessionStore {
  private data: SavedSession | null = null;

  save(data: SavedSession): void {
    // deep copy so later mutations don't alias the saved state
    this.data = JSON.parse(JSON.stringify(data));
  }

  load(): SavedSession | null {
    return this.data ? JSON.parse(JSON.stringify(this.data)) : null;
  }

  clear(): void {
    this.data = null;
  }
}

export class LocalStorageStore implements SessionStore {
  constructor(private readonly key: string) {}

  save(data: SavedSession): void {
    window.localStorage.setItem(this.key, JSON.stringify(data));
  }

  load(): SavedSession | null {
    const raw = window.localStorage.getItem(this.key);
    if (raw === null) return null;
    try {
      return JSON.parse(raw) as SavedSession;
    } catch {
      return null;
    }
  }

  clear(): void {
    window.localStorage.removeItem(this.key);
  }
}
