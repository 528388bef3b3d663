/**
 * View state machine for the assessment flow.
 *
 * Topic list -> session -> document cards with binary judgments -> done.
 * Judgments are sent to the server immediately and optimistically mirrored
 * in the card state; failed sends are queued and replayed on retry, with an
 * explicit pending indicator until the server confirms. Reloading restores
 * the session from persistent storage and re-fetches the server's state.
 */

import {
  ApiClient,
  DocumentCard,
  JudgmentLabel,
  NotFoundError,
  SessionExistsError,
  TopicInfo,
} from './api'
import {
  KeyValueStore,
  clearSession,
  loadSession,
  saveSession,
} from './storage'

export type Screen = 'topics' | 'assessing'

export interface CardState {
  doc: DocumentCard
  judgment: JudgmentLabel | null
  pending: boolean
}

export interface TopicHeader {
  id: number
  title: string
  description: string
}

export class AssessmentFlow {
  screen: Screen = 'topics'
  topics: TopicInfo[] = []
  topic: TopicHeader | null = null
  sessionId: string | null = null
  cards: CardState[] = []
  offline = false
  error: string | null = null

  private queue = new Map<string, boolean>()
  private listeners: Array<() => void> = []

  constructor(
    private readonly api: ApiClient,
    private readonly store: KeyValueStore,
    readonly assessorId: string,
  ) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener)
  }

  private notify(): void {
    for (const listener of this.listeners) listener()
  }

  get judgedCount(): number {
    return this.cards.filter((c) => c.judgment !== null).length
  }

  get total(): number {
    return this.cards.length
  }

  get complete(): boolean {
    return this.total > 0 && this.judgedCount === this.total
  }

  get pendingCount(): number {
    return this.queue.size
  }

  /** Entry point: resume a stored session if one exists, else show topics. */
  async start(): Promise<void> {
    const persisted = loadSession(this.store)
    if (persisted && persisted.assessorId === this.assessorId) {
      try {
        await this.openSession(persisted.sessionId)
        return
      } catch (err) {
        if (!(err instanceof NotFoundError)) throw err
        clearSession(this.store) // stale session: fall through to topic list
      }
    }
    await this.loadTopics()
  }

  async loadTopics(): Promise<void> {
    this.screen = 'topics'
    this.topic = null
    this.sessionId = null
    this.cards = []
    this.topics = await this.api.listTopics()
    this.error = null
    this.notify()
  }

  async selectTopic(topicId: number): Promise<void> {
    let sessionId: string
    try {
      const session = await this.api.createSession(this.assessorId, topicId)
      sessionId = session.session_id
    } catch (err) {
      if (err instanceof SessionExistsError) {
        sessionId = err.sessionId // resume the earlier session for this topic
      } else {
        throw err
      }
    }
    saveSession(this.store, { sessionId, assessorId: this.assessorId, topicId })
    await this.openSession(sessionId)
  }

  private async openSession(sessionId: string): Promise<void> {
    const payload = await this.api.getDocuments(sessionId)
    this.sessionId = payload.session_id
    this.topic = payload.topic
    this.cards = payload.documents.map((doc) => ({
      doc,
      judgment: doc.judgment,
      pending: false,
    }))
    this.screen = 'assessing'
    this.error = null
    this.notify()
  }

  /** Re-fetch server state, e.g. after the session went missing mid-flight. */
  async refresh(): Promise<void> {
    if (!this.sessionId) return
    try {
      await this.openSession(this.sessionId)
    } catch (err) {
      if (err instanceof NotFoundError) {
        clearSession(this.store)
        await this.loadTopics()
        return
      }
      throw err
    }
  }

  async judge(docId: string, relevant: boolean): Promise<void> {
    const card = this.cards.find((c) => c.doc.doc_id === docId)
    if (!card || !this.sessionId) return
    card.judgment = relevant ? 'relevant' : 'not_relevant'
    card.pending = true
    this.notify()
    try {
      await this.api.submitJudgment(this.sessionId, docId, relevant)
      card.pending = false
      this.queue.delete(docId)
      this.notify()
    } catch (err) {
      if (err instanceof NotFoundError) {
        clearSession(this.store)
        await this.loadTopics()
        return
      }
      // network trouble: keep the judgment queued and show the retry banner
      this.queue.set(docId, relevant)
      this.offline = true
      this.notify()
    }
  }

  /** Replay queued judgments; clears the banner once everything is synced. */
  async retryQueued(): Promise<void> {
    const entries = [...this.queue.entries()]
    for (const [docId, relevant] of entries) {
      if (!this.sessionId) return
      try {
        await this.api.submitJudgment(this.sessionId, docId, relevant)
        this.queue.delete(docId)
        const card = this.cards.find((c) => c.doc.doc_id === docId)
        if (card) card.pending = false
      } catch (err) {
        if (err instanceof NotFoundError) {
          clearSession(this.store)
          await this.loadTopics()
          return
        }
        this.offline = true
        this.notify()
        return // still offline; keep the rest queued
      }
    }
    this.offline = false
    this.notify()
  }

  async backToTopics(): Promise<void> {
    clearSession(this.store)
    await this.loadTopics()
  }
}
