/** Minimal key-value persistence so an assessment survives page reloads. */

export interface KeyValueStore {
  get(key: string): string | null
  set(key: string, value: string): void
  remove(key: string): void
}

export class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>()
  get(key: string): string | null {
    return this.data.has(key) ? (this.data.get(key) as string) : null
  }
  set(key: string, value: string): void {
    this.data.set(key, value)
  }
  remove(key: string): void {
    this.data.delete(key)
  }
}

export function browserStore(): KeyValueStore {
  return {
    get: (key) => window.sessionStorage.getItem(key),
    set: (key, value) => window.sessionStorage.setItem(key, value),
    remove: (key) => window.sessionStorage.removeItem(key),
  }
}

const SESSION_KEY = 'irbench.session'

export interface PersistedSession {
  sessionId: string
  assessorId: string
  topicId: number
}

export function loadSession(store: KeyValueStore): PersistedSession | null {
  const raw = store.get(SESSION_KEY)
  if (!raw) return null
  try {
    return JSON.parse(raw) as PersistedSession
  } catch {
    store.remove(SESSION_KEY)
    return null
  }
}

export function saveSession(store: KeyValueStore, session: PersistedSession): void {
  store.set(SESSION_KEY, JSON.stringify(session))
}

export function clearSession(store: KeyValueStore): void {
  store.remove(SESSION_KEY)
}
